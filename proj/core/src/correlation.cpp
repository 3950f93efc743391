// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/correlation.hpp"

#include "rsharp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

namespace rsharp::harness {

namespace {

// Strict inversions of `seq` (pairs i<j with seq[i] > seq[j]) by merge sort.
std::int64_t count_inversions(std::vector<double>& seq) {
    const std::size_t n = seq.size();
    std::vector<double> tmp(n);
    std::int64_t count = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (seq[i] <= seq[j]) {
                    tmp[k++] = seq[i++];
                } else {
                    count += static_cast<std::int64_t>(mid - i);
                    tmp[k++] = seq[j++];
                }
            }
            while (i < mid) tmp[k++] = seq[i++];
            while (j < hi) tmp[k++] = seq[j++];
            std::copy(tmp.begin() + static_cast<long>(lo), tmp.begin() + static_cast<long>(hi),
                      seq.begin() + static_cast<long>(lo));
        }
    }
    return count;
}

std::int64_t tie_pairs(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::int64_t pairs = 0;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        const std::int64_t t = static_cast<std::int64_t>(j - i);
        pairs += t * (t - 1) / 2;
        i = j;
    }
    return pairs;
}

struct TauParts {
    std::int64_t n0, n1, n2, n3, discordant;
    std::int64_t numerator() const { return n0 - n1 - n2 + n3 - 2 * discordant; }
};

// Knight's decomposition: sort by (x, y), count strict y-inversions as the
// discordant pairs, subtract tie pairs from the total.
TauParts tau_parts(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("kendall_tau: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw ValidationError("kendall_tau: need at least two observations");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    std::int64_t n1 = 0, n3 = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && x[order[j]] == x[order[i]]) ++j;
        const std::int64_t t = static_cast<std::int64_t>(j - i);
        n1 += t * (t - 1) / 2;
        std::size_t a = i;
        while (a < j) {
            std::size_t b = a;
            while (b < j && y[order[b]] == y[order[a]]) ++b;
            const std::int64_t u = static_cast<std::int64_t>(b - a);
            n3 += u * (u - 1) / 2;
            a = b;
        }
        i = j;
    }

    std::vector<double> ys(n);
    for (std::size_t k = 0; k < n; ++k) ys[k] = y[order[k]];
    const std::int64_t disc = count_inversions(ys);

    std::vector<double> ycopy(y.begin(), y.end());
    const std::int64_t n2 = tie_pairs(std::move(ycopy));
    const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    return TauParts{n0, n1, n2, n3, disc};
}

} // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    const auto p = tau_parts(x, y);
    return static_cast<double>(p.numerator()) / static_cast<double>(p.n0);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    const auto p = tau_parts(x, y);
    const double den = std::sqrt(static_cast<double>(p.n0 - p.n1)) *
                       std::sqrt(static_cast<double>(p.n0 - p.n2));
    if (den == 0.0) return 0.0;
    return static_cast<double>(p.numerator()) / den;
}

std::string CorrelationTable::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "measure,scope,alpha,tau,n\n";
    for (const auto& r : rows) {
        out << r.measure << ',' << r.scope << ',';
        if (r.has_param) out << r.param;
        out << ',' << r.tau << ',' << r.n << '\n';
    }
    return out.str();
}

} // namespace rsharp::harness
