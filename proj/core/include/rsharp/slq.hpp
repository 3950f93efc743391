// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rsharp/entropy.hpp"
#include "rsharp/linalg.hpp"
#include "rsharp/matrix.hpp"

#include <cstdint>
#include <vector>

namespace rsharp::slq {

struct SlqConfig {
    std::size_t probes = 100;        // l
    std::size_t lanczos_steps = 15;  // m
    std::uint64_t seed = 0;
    bool reorthogonalize = true;
    entropy::EigPolicy eig_policy = entropy::EigPolicy::clip_to_zero;
    double eig_floor = 1e-12;
    /// Return log(sum A_k / sum B_k) / (1 - alpha) instead of the
    /// trace-ratio form with the alpha power on the denominator.
    bool paper_ratio = false;
    /// Probes are independent; slot-based reduction keeps any thread count
    /// bit-identical to a serial run.
    std::size_t threads = 1;
};

struct TraceEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// Per-probe quadrature record. a_k is the Gauss-Lanczos quadrature of
/// v^T H^alpha v, b_k the plain second moment g^T H g, both with unit probes.
struct QuadratureResult {
    std::vector<double> a_k;
    std::vector<double> b_k;
    double t_alpha = 0.0;       // n * mean(a_k), estimates Tr(H^alpha)
    double t_one = 0.0;         // n * mean(b_k), estimates Tr(H)
    double t_alpha_stderr = 0.0;
    double t_one_stderr = 0.0;
    std::size_t early_terminations = 0; // Lanczos breakdowns (benign)
};

struct EntropyEstimate {
    double value = 0.0;
    double stderr_ = 0.0; // delta-method propagation of the probe stderrs
    QuadratureResult diagnostics;
};

/// Rademacher-probe trace estimator: mean of v^T H v, unbiased for Tr(H).
TraceEstimate hutchinson_trace(const linalg::SymmetricOperator& h, const SlqConfig& cfg);

struct LanczosResult {
    linalg::TridiagonalMatrix tridiag;
    linalg::Matrix basis; // columns are the Lanczos vectors actually built
};

/// Three-term recurrence from unit start vector v1, at most m steps, graceful
/// early exit when beta underflows relative to the running norm estimate.
/// Full (two-pass) reorthogonalization keeps the basis orthonormal to ~1e-8.
LanczosResult lanczos(const linalg::SymmetricOperator& h, std::vector<double> v1,
                      std::size_t m, bool reorthogonalize = true);

/// e1^T T^alpha e1 via the tridiagonal eigendecomposition:
/// sum_i tau_i * theta_i^alpha with the PSD policy applied to the Ritz values.
double quadrature_moment(const linalg::TridiagonalMatrix& t, const entropy::RenyiOrder& a,
                         entropy::EigPolicy policy = entropy::EigPolicy::clip_to_zero,
                         double floor = 1e-12);

/// Matrix-free Renyi entropy: estimates Tr(H^alpha) and Tr(H) with
/// unit-sphere probes and returns log(T_alpha / T_one^alpha) / (1 - alpha).
EntropyEstimate estimate_renyi_entropy(const linalg::SymmetricOperator& h,
                                       const entropy::RenyiOrder& a, const SlqConfig& cfg);

/// Largest Ritz value of a single Lanczos run.
double estimate_lambda_max(const linalg::SymmetricOperator& h, const SlqConfig& cfg);

} // namespace rsharp::slq
