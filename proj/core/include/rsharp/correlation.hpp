// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rsharp::harness {

/// Kendall tau-a: 2/(N(N-1)) * sum_{i<j} sign(x_i-x_j) sign(y_i-y_j).
/// Ties contribute zero. O(N log N) via merge counting.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Tie-corrected tau-b, available behind this separate entry point.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

struct CorrelationRow {
    std::string measure;   // renyi | hessian_trace | lambda_max | weight_l2 | sam
    std::string scope;     // global | layer<k> | - for scope-free measures
    double param = 0.0;    // alpha for renyi, rho for sam; NaN when unused
    bool has_param = false;
    double tau = 0.0;
    std::size_t n = 0;
    bool best_alpha = false; // the per-scope row selected by max |tau|
};

struct CorrelationTable {
    std::vector<CorrelationRow> rows;
    std::size_t completed_runs = 0;
    std::size_t excluded_runs = 0;

    std::string to_csv() const; // columns: measure,scope,alpha,tau,n
};

} // namespace rsharp::harness
