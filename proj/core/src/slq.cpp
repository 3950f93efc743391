// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/slq.hpp"

#include "rsharp/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace rsharp::slq {

using linalg::SeededRng;

namespace {

void validate(const linalg::SymmetricOperator& h, const SlqConfig& cfg) {
    if (h.dim == 0) throw ValidationError("slq: operator dimension must be positive");
    if (cfg.probes == 0) throw ValidationError("slq: probes must be >= 1");
    if (cfg.lanczos_steps == 0) throw ValidationError("slq: lanczos_steps must be >= 1");
}

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stderr_of_mean(const std::vector<double>& xs, double m) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

/// Runs fn(k) for k in [0, count) on cfg.threads workers. Slot k of whatever
/// fn writes is owned by probe k, so scheduling cannot change results.
void parallel_probes(std::size_t count, std::size_t threads,
                     const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= count) return;
            fn(k);
        }
    };
    std::vector<std::thread> pool;
    const std::size_t nw = std::min(threads, count);
    pool.reserve(nw);
    for (std::size_t i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

} // namespace

TraceEstimate hutchinson_trace(const linalg::SymmetricOperator& h, const SlqConfig& cfg) {
    validate(h, cfg);
    std::vector<double> samples(cfg.probes, 0.0);
    parallel_probes(cfg.probes, cfg.threads, [&](std::size_t k) {
        SeededRng rng(cfg.seed, k);
        const auto v = linalg::rand_rademacher(rng, h.dim);
        const auto hv = h(v);
        samples[k] = linalg::dot(v, hv);
    });
    const double m = mean(samples);
    return TraceEstimate{m, stderr_of_mean(samples, m)};
}

LanczosResult lanczos(const linalg::SymmetricOperator& h, std::vector<double> v1,
                      std::size_t m, bool reorthogonalize) {
    if (h.dim == 0) throw ValidationError("lanczos: empty operator");
    if (m == 0 || m > h.dim) throw ValidationError("lanczos: need 1 <= m <= dim");
    const double v1norm = linalg::norm2(v1);
    if (std::abs(v1norm - 1.0) > 1e-8)
        throw ValidationError("lanczos: start vector must have unit norm");

    const std::size_t n = h.dim;
    std::vector<std::vector<double>> basis;
    basis.reserve(m);
    std::vector<double> alphas, betas;

    basis.push_back(std::move(v1));
    std::vector<double> w = h(basis[0]);
    double alpha = linalg::dot(w, basis[0]);
    alphas.push_back(alpha);
    linalg::axpy(-alpha, basis[0], w);

    // Running Gershgorin-style bound on ||H|| from the T entries built so far.
    double hnorm_est = std::abs(alpha);

    for (std::size_t j = 1; j < m; ++j) {
        const double beta = linalg::norm2(w);
        hnorm_est = std::max(hnorm_est, std::abs(alphas.back()) + beta);
        if (beta <= 1e-12 * std::max(hnorm_est, 1e-300)) break; // invariant subspace found

        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / beta;
        if (reorthogonalize) {
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& u : basis) {
                    const double c = linalg::dot(v, u);
                    linalg::axpy(-c, u, v);
                }
            }
            const double nv = linalg::norm2(v);
            if (nv <= 1e-12) break;
            linalg::scale(1.0 / nv, v);
        }
        basis.push_back(std::move(v));

        w = h(basis[j]);
        alpha = linalg::dot(w, basis[j]);
        linalg::axpy(-alpha, basis[j], w);
        linalg::axpy(-beta, basis[j - 1], w);
        if (reorthogonalize) {
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& u : basis) {
                    const double c = linalg::dot(w, u);
                    linalg::axpy(-c, u, w);
                }
            }
        }
        alphas.push_back(alpha);
        betas.push_back(beta);
        hnorm_est = std::max(hnorm_est, std::abs(alpha) + beta);
    }

    linalg::Matrix q(n, basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) q(i, j) = basis[j][i];
    return LanczosResult{linalg::TridiagonalMatrix(std::move(alphas), std::move(betas)),
                         std::move(q)};
}

double quadrature_moment(const linalg::TridiagonalMatrix& t, const entropy::RenyiOrder& a,
                         entropy::EigPolicy policy, double floor) {
    const auto eig = linalg::tridiag_eigh(t);
    const auto theta = entropy::apply_eig_policy(eig.values, policy, floor);
    const double max_theta = *std::max_element(theta.begin(), theta.end());
    if (!(max_theta > 0.0))
        throw NumericalError("quadrature_moment: policy removed all Ritz mass");
    const double alpha = a.alpha();
    double acc = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] > 0.0) acc += eig.weights[i] * std::pow(theta[i], alpha);
    }
    return acc;
}

EntropyEstimate estimate_renyi_entropy(const linalg::SymmetricOperator& h,
                                       const entropy::RenyiOrder& a, const SlqConfig& cfg) {
    validate(h, cfg);
    if (a.is_shannon())
        throw ValidationError(
            "estimate_renyi_entropy: the SLQ path needs a numeric order (alpha != 1)");
    if (cfg.lanczos_steps > h.dim)
        throw ValidationError("slq: lanczos_steps must not exceed operator dimension");

    const std::size_t l = cfg.probes;
    const std::size_t n = h.dim;
    QuadratureResult diag;
    diag.a_k.assign(l, 0.0);
    diag.b_k.assign(l, 0.0);
    std::vector<std::uint8_t> early(l, 0);

    // Streams 2k / 2k+1 belong to probe k; evaluation order is irrelevant.
    parallel_probes(l, cfg.threads, [&](std::size_t k) {
        SeededRng rng_v(cfg.seed, 2 * k);
        auto v1 = linalg::rand_unit_vector(rng_v, n);
        const auto lz = lanczos(h, std::move(v1), cfg.lanczos_steps, cfg.reorthogonalize);
        if (lz.tridiag.dim() < cfg.lanczos_steps) early[k] = 1;
        diag.a_k[k] = quadrature_moment(lz.tridiag, a, cfg.eig_policy, cfg.eig_floor);

        SeededRng rng_g(cfg.seed, 2 * k + 1);
        const auto g = linalg::rand_unit_vector(rng_g, n);
        const auto hg = h(g);
        diag.b_k[k] = linalg::dot(g, hg);
    });

    for (auto e : early) diag.early_terminations += e;
    const double a_mean = mean(diag.a_k);
    const double b_mean = mean(diag.b_k);
    diag.t_alpha = static_cast<double>(n) * a_mean;
    diag.t_one = static_cast<double>(n) * b_mean;
    diag.t_alpha_stderr = static_cast<double>(n) * stderr_of_mean(diag.a_k, a_mean);
    diag.t_one_stderr = static_cast<double>(n) * stderr_of_mean(diag.b_k, b_mean);

    if (!(diag.t_one > 0.0))
        throw NumericalError("estimate_renyi_entropy: trace estimate is not positive");
    if (!(diag.t_alpha > 0.0))
        throw NumericalError("estimate_renyi_entropy: Tr(H^alpha) estimate is not positive");

    const double alpha = a.alpha();
    double value;
    if (cfg.paper_ratio) {
        value = std::log(a_mean / b_mean) / (1.0 - alpha);
    } else {
        value = (std::log(diag.t_alpha) - alpha * std::log(diag.t_one)) / (1.0 - alpha);
    }
    // Probe sets for A and B are independent, so the variances just add.
    const double rel_a = diag.t_alpha_stderr / diag.t_alpha;
    const double rel_b = diag.t_one_stderr / diag.t_one;
    const double se =
        std::sqrt(rel_a * rel_a + (cfg.paper_ratio ? 1.0 : alpha * alpha) * rel_b * rel_b) /
        std::abs(1.0 - alpha);

    EntropyEstimate out;
    out.value = value;
    out.stderr_ = se;
    out.diagnostics = std::move(diag);
    return out;
}

double estimate_lambda_max(const linalg::SymmetricOperator& h, const SlqConfig& cfg) {
    validate(h, cfg);
    SeededRng rng(cfg.seed, 0);
    auto v1 = linalg::rand_unit_vector(rng, h.dim);
    const std::size_t m = std::min(cfg.lanczos_steps, h.dim);
    const auto lz = lanczos(h, std::move(v1), m, cfg.reorthogonalize);
    const auto eig = linalg::tridiag_eigh(lz.tridiag);
    return eig.values.front();
}

} // namespace rsharp::slq
