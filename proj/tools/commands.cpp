// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "rsharp/entropy.hpp"
#include "rsharp/errors.hpp"
#include "rsharp/harness.hpp"
#include "rsharp/linalg.hpp"
#include "rsharp/network.hpp"
#include "rsharp/optim.hpp"
#include "rsharp/slq.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace rsharp::cli {

using nlohmann::json;

namespace {

entropy::RenyiOrder order_of(double alpha) { return entropy::RenyiOrder::of(alpha); }

} // namespace

int cmd_entropy(const EntropyArgs& args) {
    const auto m = linalg::load_matrix(args.matrix_path);
    const auto op = linalg::make_operator(m);

    slq::SlqConfig cfg;
    cfg.probes = args.probes;
    cfg.lanczos_steps = std::min(args.lanczos, m.dim());
    cfg.seed = args.seed;
    cfg.eig_policy = entropy::eig_policy_from_string(args.policy);
    cfg.paper_ratio = args.paper_ratio;
    cfg.threads = args.threads;

    const auto est = slq::estimate_renyi_entropy(op, order_of(args.alpha), cfg);

    json out;
    out["entropy"] = est.value;
    out["sharpness"] = -est.value;
    out["stderr"] = est.stderr_;
    out["diagnostics"] = {
        {"alpha", args.alpha},
        {"probes", args.probes},
        {"lanczos_steps", cfg.lanczos_steps},
        {"seed", args.seed},
        {"policy", entropy::to_string(cfg.eig_policy)},
        {"mode", args.paper_ratio ? "paper-ratio" : "trace-ratio"},
        {"t_alpha", est.diagnostics.t_alpha},
        {"t_one", est.diagnostics.t_one},
        {"t_alpha_stderr", est.diagnostics.t_alpha_stderr},
        {"t_one_stderr", est.diagnostics.t_one_stderr},
        {"early_terminations", est.diagnostics.early_terminations},
    };
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_oracle(const OracleArgs& args) {
    const auto m = linalg::load_matrix(args.matrix_path);
    const auto policy = entropy::eig_policy_from_string(args.policy);
    const auto eig = linalg::dense_eigh(m);

    if (!args.spectrum_out.empty()) {
        std::ofstream out(args.spectrum_out);
        if (!out) throw ValidationError("cannot write spectrum file: " + args.spectrum_out);
        out.precision(17);
        for (double v : eig.eigenvalues) out << v << '\n';
    }

    entropy::Spectrum s(eig.eigenvalues, policy);
    const double h = entropy::renyi_entropy(entropy::normalize_spectrum(s),
                                            order_of(args.alpha));
    json out;
    out["entropy"] = h;
    out["sharpness"] = -h;
    out["alpha"] = args.alpha;
    out["policy"] = entropy::to_string(policy);
    out["dim"] = m.dim();
    std::cout << out.dump(2) << '\n';
    return 0;
}

namespace {

struct TrainJob {
    harness::DataSpec data;
    std::string dataset_csv; // alternative to the generator
    std::size_t csv_classes = 0;
    net::MlpSpec model;
    optim::OptimConfig opt;
    harness::TrainConfig tc;
};

TrainJob train_job_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open train config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad train config: ") + e.what());
    }

    TrainJob job;
    const auto& d = j.at("dataset");
    if (d.contains("csv")) {
        job.dataset_csv = d["csv"].get<std::string>();
        job.csv_classes = d.value("classes", 0ull);
    } else {
        job.data.kind = harness::data_kind_from_string(d.at("kind").get<std::string>());
        job.data.n = d.at("n").get<std::size_t>();
        job.data.d = d.at("d").get<std::size_t>();
        job.data.classes = d.at("classes").get<std::size_t>();
        job.data.seed = d.value("seed", 0ull);
        job.data.noise_fraction = d.value("noise_fraction", 0.0);
    }

    const auto& m = j.at("model");
    for (const auto& pair : m.at("layer_shapes"))
        job.model.layer_shapes.emplace_back(pair.at(0).get<std::size_t>(),
                                            pair.at(1).get<std::size_t>());
    job.model.activation = net::activation_from_string(m.value("activation", "relu"));
    if (m.contains("leaky_slope")) job.model.leaky_slope = m["leaky_slope"].get<double>();
    job.model.loss = net::loss_from_string(m.value("loss", "softmax_cross_entropy"));
    job.model.bias = m.value("bias", false);
    job.model.validate();

    const auto& o = j.at("optim");
    job.opt.kind = optim::opt_kind_from_string(o.value("kind", "sgd"));
    job.opt.lr = o.at("lr").get<double>();
    job.opt.momentum = o.value("momentum", 0.0);
    job.opt.weight_decay = o.value("weight_decay", 0.0);
    job.opt.rho = o.value("rho", 0.0);
    job.opt.alpha = o.value("alpha", 1.1);
    if (o.contains("warmup")) {
        const auto& w = o["warmup"];
        if (w.contains("fixed_epochs")) {
            job.opt.warmup = {optim::WarmupPolicy::Mode::fixed_epochs,
                              w["fixed_epochs"].get<std::size_t>(), 0.0};
        } else if (w.contains("metric_threshold")) {
            job.opt.warmup = {optim::WarmupPolicy::Mode::metric_threshold, 0,
                              w["metric_threshold"].get<double>()};
        }
    }
    job.tc.epochs = j.at("epochs").get<std::size_t>();
    job.tc.batch_size = j.value("batch_size", 64ull);
    job.tc.seed = j.value("seed", 0ull);
    job.tc.eval_every = j.value("eval_every", 1ull);
    if (o.contains("lr_schedule")) {
        const auto& s = o["lr_schedule"];
        const auto kind = s.value("kind", "constant");
        if (kind == "cosine") {
            job.opt.schedule = {optim::LrSchedule::Kind::cosine,
                                s.value("total_epochs", job.tc.epochs),
                                s.value("warmup_epochs", 0ull)};
        } else if (kind != "constant") {
            throw ValidationError("unknown lr schedule: " + kind);
        }
    }
    job.opt.validate();
    return job;
}

} // namespace

int cmd_train(const TrainArgs& args) {
    const auto job = train_job_from_json_file(args.config_path);
    harness::DatasetPair data;
    if (!job.dataset_csv.empty()) {
        auto all = net::load_dataset_csv(job.dataset_csv, job.csv_classes);
        // No split information in a bare CSV: train on everything, evaluate
        // on the same points.
        data.train = all;
        data.test = std::move(all);
    } else {
        data = harness::gen_dataset(job.data);
    }

    const auto result = harness::train(job.model, data, job.opt, job.tc);

    std::filesystem::create_directories(args.out_dir);
    const auto model_path = args.out_dir + "/model.json";
    const auto metrics_path = args.out_dir + "/metrics.csv";
    {
        std::ofstream out(model_path);
        if (!out) throw ValidationError("cannot write " + model_path);
        out << net::model_to_json(job.model, result.params) << '\n';
    }
    harness::write_metrics_csv(result.metrics, metrics_path);

    if (result.diverged) {
        std::cerr << "training diverged at epoch " << result.diverged_epoch << '\n';
        return 3;
    }
    const auto& last = result.metrics.back();
    json out;
    out["model"] = model_path;
    out["metrics"] = metrics_path;
    out["final"] = {{"epoch", last.epoch},
                    {"train_loss", last.train_loss},
                    {"train_acc", last.train_acc},
                    {"test_loss", last.test_loss},
                    {"test_acc", last.test_acc}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_grid(const GridArgs& args) {
    const auto grid = harness::grid_spec_from_json_file(args.config_path);
    const auto outcome = harness::grid_run(grid, args.out_path, args.workers, args.resume);
    json out;
    out["results"] = args.out_path;
    out["cells"] = outcome.reports.size();
    out["executed"] = outcome.executed;
    out["skipped"] = outcome.skipped;
    std::size_t failed = 0;
    for (const auto& r : outcome.reports)
        if (!r.completed) ++failed;
    out["failed"] = failed;
    std::cout << out.dump(2) << '\n';
    return 0;
}

namespace {

json table_to_json(const harness::CorrelationTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        json e;
        e["measure"] = r.measure;
        e["scope"] = r.scope;
        if (r.has_param) e["alpha"] = r.param;
        e["tau"] = r.tau;
        e["n"] = r.n;
        if (r.best_alpha) e["best_alpha"] = true;
        rows.push_back(std::move(e));
    }
    json out;
    out["rows"] = std::move(rows);
    out["completed_runs"] = table.completed_runs;
    out["excluded_runs"] = table.excluded_runs;
    return out;
}

} // namespace

int cmd_correlate(const CorrelateArgs& args) {
    const auto reports = harness::read_reports(args.in_path);
    const auto table = harness::correlate(
        reports, harness::target_from_string(args.target), args.alpha_list);

    if (!args.out_prefix.empty()) {
        {
            std::ofstream csv(args.out_prefix + ".csv");
            if (!csv) throw ValidationError("cannot write " + args.out_prefix + ".csv");
            csv << table.to_csv();
        }
        std::ofstream js(args.out_prefix + ".json");
        if (!js) throw ValidationError("cannot write " + args.out_prefix + ".json");
        js << table_to_json(table).dump(2) << '\n';
    }
    if (args.json_stdout) {
        std::cout << table_to_json(table).dump(2) << '\n';
    } else {
        std::cout << table.to_csv();
    }
    return 0;
}

namespace {

bool report_check(const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
    return ok;
}

} // namespace

int cmd_selfcheck() {
    using linalg::SeededRng;
    bool all_ok = true;

    { // spectral inequality, 1e5 random draws
        SeededRng rng(20260810, 0);
        bool ok = true;
        for (int trial = 0; trial < 100000 && ok; ++trial) {
            const std::size_t n = 2 + rng.next_below(30);
            std::vector<double> p(n);
            double sum = 0.0;
            for (auto& v : p) {
                v = rng.next_double_pos();
                sum += v;
            }
            for (auto& v : p) v /= sum;
            const double lo = rng.next_double() < 0.5 ? rng.uniform(0.05, 0.9)
                                                      : rng.uniform(1.2, 3.0);
            const auto check = entropy::check_logdet_inequality(
                entropy::ProbVector(p), entropy::RenyiOrder::of(lo));
            ok = check.holds;
        }
        all_ok &= report_check("logdet-inequality (1e5 draws)", ok);
    }

    { // block-diagonal factorization
        SeededRng rng(7, 0);
        bool ok = true;
        for (int trial = 0; trial < 1000 && ok; ++trial) {
            const std::size_t blocks = 2 + rng.next_below(2);
            std::vector<entropy::Spectrum> parts;
            std::vector<double> concat;
            for (std::size_t b = 0; b < blocks; ++b) {
                const std::size_t len = 2 + rng.next_below(8);
                std::vector<double> v(len);
                for (auto& x : v) x = rng.uniform(0.05, 3.0);
                concat.insert(concat.end(), v.begin(), v.end());
                parts.emplace_back(std::move(v));
            }
            const double alpha =
                std::vector<double>{0.5, 1.5, 2.0, 3.0}[rng.next_below(4)];
            const auto order = entropy::RenyiOrder::of(alpha);
            const double lhs = entropy::blockdiag_power_sum(parts, order);
            const auto whole = entropy::normalize_spectrum(entropy::Spectrum(concat));
            const double rhs = entropy::power_sum(whole.values(), alpha);
            ok = std::abs(lhs - rhs) <= 1e-12;
        }
        all_ok &= report_check("blockdiag-factorization (1e3 draws)", ok);
    }

    { // exact scale invariance of matrix entropy
        SeededRng rng(11, 0);
        bool ok = true;
        for (int trial = 0; trial < 10 && ok; ++trial) {
            const std::size_t n = 16;
            linalg::DenseSymmetricMatrix m(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j <= i; ++j) m(i, j) = rng.normal();
            m.symmetrize_from_lower();
            linalg::DenseSymmetricMatrix scaled(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j <= i; ++j) scaled(i, j) = 3.7 * m(i, j);
            scaled.symmetrize_from_lower();
            const auto a = entropy::RenyiOrder::of(1.5);
            const double h1 = entropy::matrix_renyi_entropy_exact(m, a);
            const double h2 = entropy::matrix_renyi_entropy_exact(scaled, a);
            ok = std::abs(h1 - h2) <= 1e-9;
        }
        all_ok &= report_check("matrix-entropy scale invariance", ok);
    }

    { // SLQ against the dense oracle
        SeededRng rng(13, 0);
        bool ok = true;
        for (int trial = 0; trial < 3 && ok; ++trial) {
            const std::size_t n = 64;
            const auto q = linalg::haar_orthogonal(rng, n);
            std::vector<double> lam(n);
            for (auto& v : lam) v = rng.uniform(1.0, 100.0);
            linalg::DenseSymmetricMatrix m(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j <= i; ++j) {
                    double acc = 0.0;
                    for (std::size_t k = 0; k < n; ++k) acc += q(i, k) * lam[k] * q(j, k);
                    m(i, j) = acc;
                }
            m.symmetrize_from_lower();
            for (double alpha : {0.5, 1.5}) {
                const auto a = entropy::RenyiOrder::of(alpha);
                slq::SlqConfig cfg;
                cfg.seed = 1000 + trial;
                const double est =
                    slq::estimate_renyi_entropy(linalg::make_operator(m), a, cfg).value;
                const double exact = entropy::matrix_renyi_entropy_exact(m, a);
                ok = ok && std::abs(est - exact) <= 0.02 * std::abs(exact);
            }
        }
        all_ok &= report_check("slq-vs-oracle (64x64, 2%)", ok);
    }

    { // reparametrization invariance on small relu nets
        SeededRng rng(17, 0);
        bool ok = true;
        for (int trial = 0; trial < 3 && ok; ++trial) {
            net::MlpSpec spec;
            spec.layer_shapes = {{4, 5}, {4, 4}, {3, 4}};
            spec.activation = net::Activation::relu;
            spec.loss = net::Loss::mse;
            SeededRng prng(100 + trial, 0);
            auto params = net::NetworkParams::random_init(spec, prng);
            net::Dataset batch;
            batch.inputs = linalg::Matrix(16, 5);
            batch.targets = linalg::Matrix(16, 3);
            for (std::size_t i = 0; i < 16; ++i) {
                for (std::size_t j = 0; j < 5; ++j) batch.inputs(i, j) = prng.normal();
                for (std::size_t j = 0; j < 3; ++j) batch.targets(i, j) = prng.normal();
            }
            const double c1 = rng.uniform(0.5, 2.0), c2 = rng.uniform(0.5, 2.0);
            const std::vector<double> f{c1, c2, 1.0 / (c1 * c2)};
            const auto scaled = net::rescale_layers(params, f);
            for (std::size_t l = 0; l < 3 && ok; ++l) {
                const auto h0 = net::explicit_layer_hessian(spec, params, batch, l);
                const auto h1 = net::explicit_layer_hessian(spec, scaled, batch, l);
                const auto a = entropy::RenyiOrder::of(1.5);
                const double s0 = entropy::renyi_sharpness(h0, a);
                const double s1 = entropy::renyi_sharpness(h1, a);
                ok = std::abs(s0 - s1) <= 1e-6 * std::max({std::abs(s0), std::abs(s1), 1e-6});
            }
        }
        all_ok &= report_check("reparametrization invariance (relu)", ok);
    }

    { // multiplicative perturbation identity
        SeededRng rng(19, 0);
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            net::MlpSpec spec;
            spec.layer_shapes = {{6, 5}, {3, 6}};
            spec.activation = net::Activation::relu;
            SeededRng prng(200 + trial, 0);
            const auto params = net::NetworkParams::random_init(spec, prng);
            std::vector<double> h(5);
            for (auto& v : h) v = prng.normal();
            const auto a = linalg::haar_orthogonal(prng, 5);
            const double rho = rng.uniform(0.0, 0.5);
            ok = net::multiplicative_perturb_identity_check(spec, params, h, a, rho) <= 1e-10;
        }
        all_ok &= report_check("multiplicative-perturbation identity", ok);
    }

    { // kendall tau against brute force
        SeededRng rng(23, 0);
        bool ok = true;
        for (int trial = 0; trial < 200 && ok; ++trial) {
            const std::size_t n = 2 + rng.next_below(40);
            std::vector<double> x(n), y(n);
            for (auto& v : x) v = static_cast<double>(rng.next_below(10));
            for (auto& v : y) v = static_cast<double>(rng.next_below(10));
            double num = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double sx = x[i] == x[j] ? 0.0 : (x[i] < x[j] ? -1.0 : 1.0);
                    const double sy = y[i] == y[j] ? 0.0 : (y[i] < y[j] ? -1.0 : 1.0);
                    num += sx * sy;
                }
            const double brute =
                2.0 * num / (static_cast<double>(n) * static_cast<double>(n - 1));
            ok = harness::kendall_tau(x, y) == brute;
        }
        all_ok &= report_check("kendall-tau vs brute force", ok);
    }

    std::cout << (all_ok ? "selfcheck: all suites passed" : "selfcheck: FAILURES") << '\n';
    return all_ok ? 0 : 3;
}

} // namespace rsharp::cli
