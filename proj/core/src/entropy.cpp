// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/entropy.hpp"

#include "rsharp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsharp::entropy {

EigPolicy eig_policy_from_string(const std::string& s) {
    if (s == "clip" || s == "clip_to_zero") return EigPolicy::clip_to_zero;
    if (s == "abs") return EigPolicy::abs;
    if (s == "shift") return EigPolicy::shift;
    throw ValidationError("unknown eigenvalue policy: " + s);
}

std::string to_string(EigPolicy p) {
    switch (p) {
        case EigPolicy::clip_to_zero: return "clip";
        case EigPolicy::abs: return "abs";
        case EigPolicy::shift: return "shift";
    }
    return "?";
}

RenyiOrder RenyiOrder::of(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ValidationError("Renyi order must be a positive real");
    if (std::abs(alpha - 1.0) < 1e-3)
        throw ValidationError(
            "Renyi order too close to 1 (guard band 1e-3); use RenyiOrder::shannon()");
    return RenyiOrder(alpha, false);
}

RenyiOrder RenyiOrder::shannon() { return RenyiOrder(1.0, true); }

double RenyiOrder::alpha() const {
    if (shannon_) throw ValidationError("symbolic Shannon order has no numeric alpha");
    return alpha_;
}

ProbVector::ProbVector(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw ValidationError("ProbVector: empty");
    double sum = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError("ProbVector: entries must be finite and nonnegative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw ValidationError("ProbVector: entries must sum to 1 within 1e-10");
}

Spectrum::Spectrum(std::vector<double> values, EigPolicy pol, double fl)
    : eigenvalues(std::move(values)), policy(pol), floor(fl) {
    if (eigenvalues.empty()) throw ValidationError("Spectrum: empty");
    std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
}

std::vector<double> apply_eig_policy(std::vector<double> values, EigPolicy policy,
                                     double floor) {
    double max_abs = 0.0;
    for (double v : values) max_abs = std::max(max_abs, std::abs(v));
    const double cut = floor * max_abs;
    switch (policy) {
        case EigPolicy::abs:
            for (double& v : values) {
                v = std::abs(v);
                if (v < cut) v = 0.0;
            }
            break;
        case EigPolicy::clip_to_zero:
            for (double& v : values)
                if (v < cut) v = 0.0;
            break;
        case EigPolicy::shift: {
            const double min_v = *std::min_element(values.begin(), values.end());
            if (min_v < 0.0) {
                const double offset = -min_v + floor * max_abs;
                for (double& v : values) v += offset;
            }
            for (double& v : values)
                if (v < 0.0) v = 0.0;
            break;
        }
    }
    return values;
}

std::vector<double> Spectrum::apply_policy() const {
    return apply_eig_policy(eigenvalues, policy, floor);
}

double power_sum(const std::vector<double>& p, double alpha) {
    // log-sum-exp over alpha * log p_i; zero masses are dropped (they
    // contribute nothing for alpha > 0 and would poison the logs).
    double max_log = -std::numeric_limits<double>::infinity();
    for (double v : p)
        if (v > 0.0) max_log = std::max(max_log, std::log(v));
    if (!std::isfinite(max_log)) throw NumericalError("power_sum: no positive mass");
    double acc = 0.0;
    for (double v : p)
        if (v > 0.0) acc += std::exp(alpha * (std::log(v) - max_log));
    return std::exp(alpha * max_log) * acc;
}

namespace {

double log_power_sum(const std::vector<double>& p, double alpha) {
    double max_log = -std::numeric_limits<double>::infinity();
    for (double v : p)
        if (v > 0.0) max_log = std::max(max_log, std::log(v));
    if (!std::isfinite(max_log)) throw NumericalError("power_sum: no positive mass");
    double acc = 0.0;
    for (double v : p)
        if (v > 0.0) acc += std::exp(alpha * (std::log(v) - max_log));
    return alpha * max_log + std::log(acc);
}

} // namespace

double renyi_entropy(const ProbVector& p, const RenyiOrder& a) {
    if (a.is_shannon()) {
        double h = 0.0;
        for (double v : p.values())
            if (v > 0.0) h -= v * std::log(v);
        return h;
    }
    const double alpha = a.alpha();
    return log_power_sum(p.values(), alpha) / (1.0 - alpha);
}

ProbVector normalize_spectrum(const Spectrum& s) {
    auto vals = s.apply_policy();
    double trace = 0.0;
    for (double v : vals) trace += v;
    if (!(trace > 0.0))
        throw NumericalError("indefinite spectrum not normalizable (post-policy trace <= 0)");
    for (double& v : vals) v /= trace;
    // Tidy the tail so the ProbVector invariant holds exactly enough.
    double sum = 0.0;
    for (double v : vals) sum += v;
    for (double& v : vals) v /= sum;
    return ProbVector(std::move(vals));
}

double matrix_renyi_entropy_exact(const linalg::DenseSymmetricMatrix& m,
                                  const RenyiOrder& a, EigPolicy policy,
                                  std::size_t oracle_cap) {
    if (m.dim() > oracle_cap)
        throw ValidationError("matrix_renyi_entropy_exact: dimension exceeds oracle cap");
    auto eig = linalg::dense_eigh(m);
    Spectrum s(std::move(eig.eigenvalues), policy);
    return renyi_entropy(normalize_spectrum(s), a);
}

double renyi_sharpness(const linalg::DenseSymmetricMatrix& m, const RenyiOrder& a,
                       EigPolicy policy, std::size_t oracle_cap) {
    return -matrix_renyi_entropy_exact(m, a, policy, oracle_cap);
}

InequalityCheck check_logdet_inequality(const ProbVector& p, const RenyiOrder& a) {
    double log_sum = 0.0;
    for (double v : p.values()) {
        if (!(v > 0.0))
            throw ValidationError("check_logdet_inequality: requires strictly positive entries");
        log_sum += std::log(v);
    }
    const double h = renyi_entropy(p, a);
    const double slack = -h - log_sum;
    return InequalityCheck{log_sum <= -h, slack};
}

double blockdiag_power_sum(const std::vector<Spectrum>& blocks, const RenyiOrder& a) {
    if (blocks.empty()) throw ValidationError("blockdiag_power_sum: empty block list");
    const double alpha = a.is_shannon() ? 1.0 : a.alpha();

    std::vector<std::vector<double>> vals;
    std::vector<double> traces;
    double total = 0.0;
    for (const auto& b : blocks) {
        auto v = b.apply_policy();
        double tr = 0.0;
        for (double x : v) tr += x;
        if (!(tr > 0.0))
            throw NumericalError("blockdiag_power_sum: block trace must be positive");
        traces.push_back(tr);
        vals.push_back(std::move(v));
        total += tr;
    }

    double acc = 0.0;
    for (std::size_t l = 0; l < vals.size(); ++l) {
        const double w = traces[l] / total;
        std::vector<double> normalized = vals[l];
        for (double& x : normalized) x /= traces[l];
        acc += std::pow(w, alpha) * power_sum(normalized, alpha);
    }
    return acc;
}

} // namespace rsharp::entropy
