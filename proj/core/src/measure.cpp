// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/harness.hpp"

#include "rsharp/errors.hpp"
#include "rsharp/slq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsharp::harness {

using linalg::SeededRng;
using linalg::derive_seed;

namespace {

slq::SlqConfig make_slq_config(const MeasureConfig& cfg, std::uint64_t seed,
                               std::size_t dim) {
    slq::SlqConfig out;
    out.probes = cfg.probes;
    out.lanczos_steps = std::min(cfg.lanczos_steps, dim);
    out.seed = seed;
    out.eig_policy = cfg.policy;
    out.threads = cfg.threads;
    return out;
}

MeasureValue renyi_for_operator(const linalg::SymmetricOperator& op, double alpha,
                                const MeasureConfig& cfg, std::uint64_t seed) {
    MeasureValue out;
    auto scfg = make_slq_config(cfg, seed, op.dim);
    const auto order = entropy::RenyiOrder::of(alpha);
    try {
        out.value = -slq::estimate_renyi_entropy(op, order, scfg).value;
        out.ok = true;
        return out;
    } catch (const NumericalError&) {
        // Indefinite spectra can defeat the clip policy; retry with abs and tag.
    }
    try {
        scfg.eig_policy = entropy::EigPolicy::abs;
        out.value = -slq::estimate_renyi_entropy(op, order, scfg).value;
        out.ok = true;
        out.note = "abs-policy-fallback";
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

} // namespace

SharpnessReport measure_sharpness(const net::MlpSpec& spec,
                                  const net::NetworkParams& params,
                                  const net::Dataset& train_data,
                                  const MeasureConfig& cfg) {
    SharpnessReport report;
    if (train_data.size() == 0)
        throw ValidationError("measure_sharpness: empty training data");

    // Fixed-size subsample with its own seed; every measure sees the same points.
    const std::size_t take = std::min(cfg.sample_size, train_data.size());
    std::vector<std::size_t> idx(train_data.size());
    std::iota(idx.begin(), idx.end(), 0);
    SeededRng sample_rng(cfg.seed, 0);
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = sample_rng.next_below(i);
        std::swap(idx[i - 1], idx[j]);
    }
    const auto batch = train_data.subset(std::span<const std::size_t>(idx).subspan(0, take));

    const auto global_op = net::full_operator(spec, params, batch);
    const std::size_t layers = spec.num_layers();

    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
        const double alpha = cfg.alphas[ai];
        {
            RenyiMeasurement m;
            m.scope = "global";
            m.alpha = alpha;
            m.v = renyi_for_operator(global_op, alpha, cfg,
                                     derive_seed(cfg.seed, 1000 + ai * 256));
            report.renyi.push_back(std::move(m));
        }
        for (std::size_t l = 0; l < layers; ++l) {
            RenyiMeasurement m;
            m.scope = "layer" + std::to_string(l);
            m.alpha = alpha;
            const auto op = net::layer_operator(spec, params, batch, l);
            m.v = renyi_for_operator(op, alpha, cfg,
                                     derive_seed(cfg.seed, 1000 + ai * 256 + l + 1));
            report.renyi.push_back(std::move(m));
        }
    }

    try {
        const auto tr =
            slq::hutchinson_trace(global_op, make_slq_config(cfg, derive_seed(cfg.seed, 2),
                                                             global_op.dim));
        report.hessian_trace = MeasureValue{tr.value, true, "", ""};
    } catch (const std::exception& e) {
        report.hessian_trace.error = e.what();
    }

    try {
        auto scfg = make_slq_config(cfg, derive_seed(cfg.seed, 3), global_op.dim);
        scfg.lanczos_steps = std::min(cfg.lambda_max_steps, global_op.dim);
        report.lambda_max = MeasureValue{slq::estimate_lambda_max(global_op, scfg), true, "", ""};
    } catch (const std::exception& e) {
        report.lambda_max.error = e.what();
    }

    report.weight_l2 = MeasureValue{params.l2_norm(), true, "", ""};

    try {
        const auto lg = net::loss_and_grad(spec, params, batch);
        const double gnorm = linalg::norm2(lg.grad);
        for (double rho : cfg.sam_rhos) {
            if (gnorm == 0.0) {
                report.sam_sharpness.emplace_back(rho, MeasureValue{0.0, true, "", ""});
                continue;
            }
            net::NetworkParams moved = params;
            const double s = rho / gnorm;
            for (std::size_t i = 0; i < moved.flat.size(); ++i)
                moved.flat[i] += s * lg.grad[i];
            const double up = net::loss_only(spec, moved, batch) - lg.loss;
            report.sam_sharpness.emplace_back(rho, MeasureValue{up, true, "", ""});
        }
    } catch (const std::exception& e) {
        for (double rho : cfg.sam_rhos)
            report.sam_sharpness.emplace_back(rho, MeasureValue{0.0, false, e.what(), ""});
    }

    return report;
}

} // namespace rsharp::harness
