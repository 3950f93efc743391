// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/harness.hpp"

#include "rsharp/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

namespace rsharp::harness {

using linalg::derive_seed;
using nlohmann::json;

void GridSpec::validate() const {
    model.validate();
    if (learning_rates.empty() || batch_sizes.empty() || weight_decays.empty() ||
        optimizers.empty() || seeds.empty())
        throw ValidationError("grid: every hyperparameter list must be nonempty");
    if (epochs == 0) throw ValidationError("grid: epochs must be >= 1");
    for (const auto& o : optimizers) optim::opt_kind_from_string(o);
}

std::size_t GridSpec::cell_count() const {
    return learning_rates.size() * batch_sizes.size() * weight_decays.size() *
           optimizers.size() * seeds.size();
}

namespace {

struct Cell {
    std::size_t index;
    double lr;
    std::size_t batch;
    double wd;
    std::string opt;
    std::uint64_t seed;
};

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string cell_run_id(const Cell& c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "c%05zu-%s-lr%s-b%zu-wd%s-s%llu", c.index,
                  c.opt.c_str(), fmt_g(c.lr).c_str(), c.batch, fmt_g(c.wd).c_str(),
                  static_cast<unsigned long long>(c.seed));
    return buf;
}

std::vector<Cell> enumerate_cells(const GridSpec& g) {
    std::vector<Cell> cells;
    std::size_t index = 0;
    for (double lr : g.learning_rates)
        for (std::size_t b : g.batch_sizes)
            for (double wd : g.weight_decays)
                for (const auto& opt : g.optimizers)
                    for (std::uint64_t s : g.seeds)
                        cells.push_back(Cell{index++, lr, b, wd, opt, s});
    return cells;
}

SharpnessReport run_cell(const GridSpec& grid, const DatasetPair& data, const Cell& cell) {
    optim::OptimConfig opt;
    opt.kind = optim::opt_kind_from_string(cell.opt);
    opt.lr = cell.lr;
    opt.momentum = grid.momentum;
    opt.weight_decay = cell.wd;
    opt.rho = grid.rho;
    opt.alpha = grid.alpha;
    opt.warmup = {optim::WarmupPolicy::Mode::fixed_epochs, grid.warmup_epochs, 0.0};
    if (grid.cosine_schedule)
        opt.schedule = {optim::LrSchedule::Kind::cosine, grid.epochs, 0};

    const std::uint64_t cell_seed = derive_seed(grid.seed, cell.index);
    TrainConfig tc{grid.epochs, cell.batch, cell_seed, grid.eval_every};

    SharpnessReport report;
    report.run_id = cell_run_id(cell);
    report.hp = HyperParams{cell.opt, cell.lr, cell.batch, cell.wd, cell.seed};

    // The model seed folds in the grid cell's own seed entry so "seeds" acts
    // as the replication axis.
    tc.seed = derive_seed(cell_seed, cell.seed);

    const auto tr = train(grid.model, data, opt, tc);
    if (tr.diverged) {
        report.completed = false;
        report.failure_reason =
            "diverged at epoch " + std::to_string(tr.diverged_epoch);
        return report;
    }
    const auto& last = tr.metrics.back();
    report.train_loss = last.train_loss;
    report.test_loss = last.test_loss;
    report.train_acc = last.train_acc;
    report.test_acc = last.test_acc;
    report.generalization_gap = last.test_loss - last.train_loss;
    report.accuracy_gap = last.train_acc - last.test_acc;

    MeasureConfig mc = grid.measure;
    mc.seed = derive_seed(tc.seed, 0xfeed);
    const auto measured = measure_sharpness(grid.model, tr.params, data.train, mc);
    report.renyi = measured.renyi;
    report.hessian_trace = measured.hessian_trace;
    report.lambda_max = measured.lambda_max;
    report.weight_l2 = measured.weight_l2;
    report.sam_sharpness = measured.sam_sharpness;
    report.completed = true;
    return report;
}

} // namespace

GridOutcome grid_run(const GridSpec& grid, const std::string& out_path,
                     std::size_t workers, bool resume) {
    grid.validate();
    const auto cells = enumerate_cells(grid);
    const auto data = gen_dataset(grid.data);

    std::vector<std::optional<SharpnessReport>> slots(cells.size());
    std::set<std::string> have;
    GridOutcome outcome;

    if (resume && std::filesystem::exists(out_path)) {
        for (auto& r : read_reports(out_path)) {
            have.insert(r.run_id);
            for (const auto& c : cells)
                if (cell_run_id(c) == r.run_id) {
                    slots[c.index] = std::move(r);
                    break;
                }
        }
    }

    std::vector<std::size_t> todo;
    for (const auto& c : cells) {
        if (slots[c.index].has_value()) {
            ++outcome.skipped;
        } else {
            todo.push_back(c.index);
        }
    }

    // Append-only progress log; the canonical rewrite happens at the end.
    std::ofstream log(out_path, resume ? std::ios::app : std::ios::trunc);
    if (!log) throw ValidationError("cannot write results file: " + out_path);
    std::mutex log_mutex;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= todo.size()) return;
            const Cell& cell = cells[todo[t]];
            SharpnessReport report;
            try {
                report = run_cell(grid, data, cell);
            } catch (const std::exception& e) {
                report.run_id = cell_run_id(cell);
                report.hp = HyperParams{cell.opt, cell.lr, cell.batch, cell.wd, cell.seed};
                report.completed = false;
                report.failure_reason = e.what();
            }
            {
                std::lock_guard<std::mutex> lock(log_mutex);
                log << report_to_json_line(report) << '\n';
                log.flush();
            }
            slots[cell.index] = std::move(report);
        }
    };
    const std::size_t nw = std::max<std::size_t>(1, std::min(workers, todo.size()));
    if (nw <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < nw; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    log.close();
    outcome.executed = todo.size();

    for (auto& s : slots) outcome.reports.push_back(std::move(*s));
    std::sort(outcome.reports.begin(), outcome.reports.end(),
              [](const auto& a, const auto& b) { return a.run_id < b.run_id; });
    write_reports(outcome.reports, out_path);
    return outcome;
}

GridSpec grid_spec_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open grid config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad grid config: ") + e.what());
    }

    GridSpec g;
    const auto& d = j.at("dataset");
    g.data.kind = data_kind_from_string(d.at("kind").get<std::string>());
    g.data.n = d.at("n").get<std::size_t>();
    g.data.d = d.at("d").get<std::size_t>();
    g.data.classes = d.at("classes").get<std::size_t>();
    g.data.seed = d.value("seed", 0ull);
    g.data.noise_fraction = d.value("noise_fraction", 0.0);

    const auto& m = j.at("model");
    for (const auto& pair : m.at("layer_shapes"))
        g.model.layer_shapes.emplace_back(pair.at(0).get<std::size_t>(),
                                          pair.at(1).get<std::size_t>());
    g.model.activation = net::activation_from_string(m.value("activation", "relu"));
    if (m.contains("leaky_slope")) g.model.leaky_slope = m["leaky_slope"].get<double>();
    g.model.loss = net::loss_from_string(m.value("loss", "softmax_cross_entropy"));
    g.model.bias = m.value("bias", false);

    const auto& gr = j.at("grid");
    g.learning_rates = gr.at("learning_rates").get<std::vector<double>>();
    g.batch_sizes = gr.at("batch_sizes").get<std::vector<std::size_t>>();
    g.weight_decays = gr.at("weight_decays").get<std::vector<double>>();
    g.optimizers = gr.at("optimizers").get<std::vector<std::string>>();
    g.seeds = gr.at("seeds").get<std::vector<std::uint64_t>>();

    g.epochs = j.at("epochs").get<std::size_t>();
    g.eval_every = j.value("eval_every", 1ull);
    g.seed = j.value("seed", 0ull);
    g.momentum = j.value("momentum", 0.9);
    g.rho = j.value("rho", 0.5);
    g.alpha = j.value("alpha", 1.1);
    g.warmup_epochs = j.value("warmup_epochs", 5ull);
    g.cosine_schedule = j.value("cosine_schedule", true);

    if (j.contains("measure")) {
        const auto& me = j["measure"];
        if (me.contains("alphas")) g.measure.alphas = me["alphas"].get<std::vector<double>>();
        g.measure.probes = me.value("probes", g.measure.probes);
        g.measure.lanczos_steps = me.value("lanczos_steps", g.measure.lanczos_steps);
        g.measure.lambda_max_steps = me.value("lambda_max_steps", g.measure.lambda_max_steps);
        g.measure.sample_size = me.value("sample_size", g.measure.sample_size);
        if (me.contains("sam_rhos"))
            g.measure.sam_rhos = me["sam_rhos"].get<std::vector<double>>();
        if (me.contains("policy"))
            g.measure.policy = entropy::eig_policy_from_string(me["policy"].get<std::string>());
    }
    g.validate();
    return g;
}

} // namespace rsharp::harness
