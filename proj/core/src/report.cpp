// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/harness.hpp"

#include "rsharp/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace rsharp::harness {

using nlohmann::json;

namespace {

json value_to_json(const MeasureValue& v) {
    json j;
    j["ok"] = v.ok;
    if (v.ok) j["value"] = v.value;
    if (!v.error.empty()) j["error"] = v.error;
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

MeasureValue value_from_json(const json& j) {
    MeasureValue v;
    v.ok = j.value("ok", false);
    if (j.contains("value")) v.value = j["value"].get<double>();
    v.error = j.value("error", "");
    v.note = j.value("note", "");
    return v;
}

} // namespace

std::string report_to_json_line(const SharpnessReport& r) {
    json j;
    j["run_id"] = r.run_id;
    j["hyperparameters"] = {{"optimizer", r.hp.optimizer},
                            {"lr", r.hp.lr},
                            {"batch_size", r.hp.batch_size},
                            {"weight_decay", r.hp.weight_decay},
                            {"seed", r.hp.seed}};
    j["completed"] = r.completed;
    if (!r.failure_reason.empty()) j["failure_reason"] = r.failure_reason;
    j["train_loss"] = r.train_loss;
    j["test_loss"] = r.test_loss;
    j["train_acc"] = r.train_acc;
    j["test_acc"] = r.test_acc;
    j["generalization_gap"] = r.generalization_gap;
    j["accuracy_gap"] = r.accuracy_gap;

    j["renyi"] = json::array();
    for (const auto& m : r.renyi) {
        json e = value_to_json(m.v);
        e["scope"] = m.scope;
        e["alpha"] = m.alpha;
        j["renyi"].push_back(std::move(e));
    }
    j["hessian_trace"] = value_to_json(r.hessian_trace);
    j["lambda_max"] = value_to_json(r.lambda_max);
    j["weight_l2"] = value_to_json(r.weight_l2);
    j["sam_sharpness"] = json::array();
    for (const auto& [rho, v] : r.sam_sharpness) {
        json e = value_to_json(v);
        e["rho"] = rho;
        j["sam_sharpness"].push_back(std::move(e));
    }
    return j.dump();
}

SharpnessReport report_from_json_line(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad report line: ") + e.what());
    }
    SharpnessReport r;
    r.run_id = j.at("run_id").get<std::string>();
    const auto& hp = j.at("hyperparameters");
    r.hp.optimizer = hp.at("optimizer").get<std::string>();
    r.hp.lr = hp.at("lr").get<double>();
    r.hp.batch_size = hp.at("batch_size").get<std::size_t>();
    r.hp.weight_decay = hp.at("weight_decay").get<double>();
    r.hp.seed = hp.at("seed").get<std::uint64_t>();
    r.completed = j.at("completed").get<bool>();
    r.failure_reason = j.value("failure_reason", "");
    r.train_loss = j.at("train_loss").get<double>();
    r.test_loss = j.at("test_loss").get<double>();
    r.train_acc = j.at("train_acc").get<double>();
    r.test_acc = j.at("test_acc").get<double>();
    r.generalization_gap = j.at("generalization_gap").get<double>();
    r.accuracy_gap = j.value("accuracy_gap", 0.0);

    const double recomputed = r.test_loss - r.train_loss;
    if (std::isfinite(recomputed) &&
        std::abs(recomputed - r.generalization_gap) > 1e-12)
        throw ValidationError("report: generalization_gap does not match test-train");

    for (const auto& e : j.at("renyi")) {
        RenyiMeasurement m;
        m.scope = e.at("scope").get<std::string>();
        m.alpha = e.at("alpha").get<double>();
        m.v = value_from_json(e);
        r.renyi.push_back(std::move(m));
    }
    r.hessian_trace = value_from_json(j.at("hessian_trace"));
    r.lambda_max = value_from_json(j.at("lambda_max"));
    r.weight_l2 = value_from_json(j.at("weight_l2"));
    for (const auto& e : j.at("sam_sharpness"))
        r.sam_sharpness.emplace_back(e.at("rho").get<double>(), value_from_json(e));
    return r;
}

void write_reports(const std::vector<SharpnessReport>& reports, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ValidationError("cannot write results file: " + path);
    for (const auto& r : reports) out << report_to_json_line(r) << '\n';
}

std::vector<SharpnessReport> read_reports(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open results file: " + path);
    std::vector<SharpnessReport> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(report_from_json_line(line));
    }
    return out;
}

Target target_from_string(const std::string& s) {
    if (s == "gap") return Target::gap;
    if (s == "test_loss") return Target::test_loss;
    throw ValidationError("unknown correlation target: " + s);
}

namespace {

struct Series {
    std::vector<double> x, y;
};

void add_row(CorrelationTable& table, const std::string& measure, const std::string& scope,
             bool has_param, double param, const Series& s) {
    if (s.x.size() < 2) return;
    CorrelationRow row;
    row.measure = measure;
    row.scope = scope;
    row.has_param = has_param;
    row.param = param;
    row.tau = kendall_tau(s.x, s.y);
    row.n = s.x.size();
    table.rows.push_back(std::move(row));
}

} // namespace

CorrelationTable correlate(const std::vector<SharpnessReport>& reports, Target target,
                           const std::vector<double>& alpha_filter) {
    std::vector<const SharpnessReport*> done;
    for (const auto& r : reports)
        if (r.completed) done.push_back(&r);
    CorrelationTable table;
    table.completed_runs = done.size();
    table.excluded_runs = reports.size() - done.size();
    if (done.size() < 2)
        throw ValidationError("correlate: need at least two completed runs");

    auto target_of = [&](const SharpnessReport& r) {
        return target == Target::gap ? r.generalization_gap : r.test_loss;
    };
    auto alpha_selected = [&](double a) {
        if (alpha_filter.empty()) return true;
        for (double f : alpha_filter)
            if (std::abs(f - a) < 1e-12) return true;
        return false;
    };

    // Renyi rows: one per (scope, alpha), pairwise deletion of failed entries.
    std::vector<std::pair<std::string, double>> keys;
    for (const auto* r : done)
        for (const auto& m : r->renyi) {
            if (!alpha_selected(m.alpha)) continue;
            const auto key = std::make_pair(m.scope, m.alpha);
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        }
    std::stable_sort(keys.begin(), keys.end());

    std::size_t renyi_row_begin = table.rows.size();
    for (const auto& [scope, alpha] : keys) {
        Series s;
        for (const auto* r : done) {
            for (const auto& m : r->renyi) {
                if (m.scope == scope && std::abs(m.alpha - alpha) < 1e-12 && m.v.ok) {
                    s.x.push_back(m.v.value);
                    s.y.push_back(target_of(*r));
                    break;
                }
            }
        }
        add_row(table, "renyi", scope, true, alpha, s);
    }
    // Best-alpha row per scope: the alpha maximizing |tau|.
    {
        std::vector<std::string> scopes;
        for (std::size_t i = renyi_row_begin; i < table.rows.size(); ++i) {
            const auto& scope = table.rows[i].scope;
            if (std::find(scopes.begin(), scopes.end(), scope) == scopes.end())
                scopes.push_back(scope);
        }
        std::vector<CorrelationRow> best_rows;
        for (const auto& scope : scopes) {
            const CorrelationRow* best = nullptr;
            for (std::size_t i = renyi_row_begin; i < table.rows.size(); ++i) {
                const auto& row = table.rows[i];
                if (row.scope != scope) continue;
                if (!best || std::abs(row.tau) > std::abs(best->tau)) best = &row;
            }
            if (best) {
                CorrelationRow b = *best;
                b.measure = "renyi_best";
                b.best_alpha = true;
                best_rows.push_back(std::move(b));
            }
        }
        for (auto& b : best_rows) table.rows.push_back(std::move(b));
    }

    auto scalar_series = [&](auto pick) {
        Series s;
        for (const auto* r : done) {
            const MeasureValue& v = pick(*r);
            if (v.ok) {
                s.x.push_back(v.value);
                s.y.push_back(target_of(*r));
            }
        }
        return s;
    };
    add_row(table, "hessian_trace", "global", false, 0.0,
            scalar_series([](const SharpnessReport& r) -> const MeasureValue& {
                return r.hessian_trace;
            }));
    add_row(table, "lambda_max", "global", false, 0.0,
            scalar_series([](const SharpnessReport& r) -> const MeasureValue& {
                return r.lambda_max;
            }));
    add_row(table, "weight_l2", "global", false, 0.0,
            scalar_series([](const SharpnessReport& r) -> const MeasureValue& {
                return r.weight_l2;
            }));

    std::vector<double> rhos;
    for (const auto* r : done)
        for (const auto& [rho, v] : r->sam_sharpness)
            if (std::find(rhos.begin(), rhos.end(), rho) == rhos.end()) rhos.push_back(rho);
    std::sort(rhos.begin(), rhos.end());
    for (double rho : rhos) {
        Series s;
        for (const auto* r : done)
            for (const auto& [rr, v] : r->sam_sharpness)
                if (rr == rho && v.ok) {
                    s.x.push_back(v.value);
                    s.y.push_back(target_of(*r));
                    break;
                }
        add_row(table, "sam", "global", true, rho, s);
    }
    return table;
}

} // namespace rsharp::harness
