// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rsharp/linalg.hpp"
#include "rsharp/matrix.hpp"

#include <string>
#include <vector>

namespace rsharp::entropy {

/// How negative eigenvalues are folded into a PSD spectrum before
/// normalization. Near a minimum the negatives are noise, so clipping is the
/// default; `abs` and `shift` (add |lambda_min| + eps) are selectable.
enum class EigPolicy { clip_to_zero, abs, shift };

EigPolicy eig_policy_from_string(const std::string& s);
std::string to_string(EigPolicy p);

/// Renyi order alpha > 0. Values inside the guard band |alpha - 1| < 1e-3 are
/// rejected because 1/(1-alpha) is numerically useless there; the Shannon
/// limit is a distinct symbolic value with its own evaluation branch.
class RenyiOrder {
public:
    static RenyiOrder of(double alpha);
    static RenyiOrder shannon();

    bool is_shannon() const { return shannon_; }
    /// Only valid when !is_shannon().
    double alpha() const;

private:
    RenyiOrder(double a, bool sh) : alpha_(a), shannon_(sh) {}
    double alpha_ = 0.0;
    bool shannon_ = false;
};

/// Probability vector: entries nonnegative, summing to 1 within 1e-10.
class ProbVector {
public:
    explicit ProbVector(std::vector<double> p);
    const std::vector<double>& values() const { return p_; }
    std::size_t size() const { return p_.size(); }

private:
    std::vector<double> p_;
};

/// Eigenvalue list sorted descending, plus the PSD policy used to interpret
/// it. `floor` is relative to the largest magnitude eigenvalue.
struct Spectrum {
    std::vector<double> eigenvalues; // sorted descending on construction
    EigPolicy policy = EigPolicy::clip_to_zero;
    double floor = 1e-12;

    explicit Spectrum(std::vector<double> values,
                      EigPolicy pol = EigPolicy::clip_to_zero, double fl = 1e-12);

    /// Eigenvalues after the policy; all retained values are >= 0.
    std::vector<double> apply_policy() const;
};

/// Applies a policy to a raw value list without constructing a Spectrum.
std::vector<double> apply_eig_policy(std::vector<double> values, EigPolicy policy,
                                     double floor = 1e-12);

/// H_alpha(p) = log(sum p_i^alpha) / (1 - alpha); Shannon branch returns
/// -sum p_i log p_i with 0 log 0 := 0. Result lies in [0, log n].
double renyi_entropy(const ProbVector& p, const RenyiOrder& a);

/// sum p_i^alpha evaluated stably in log space (zero masses dropped).
double power_sum(const std::vector<double>& p, double alpha);

/// p_i = lambda_i / trace after the policy. Throws NumericalError when the
/// post-policy trace is not positive ("indefinite spectrum not normalizable").
ProbVector normalize_spectrum(const Spectrum& s);

/// Exact matrix Renyi entropy through the dense eigensolver oracle.
/// `oracle_cap` guards against accidentally feeding huge matrices to an
/// O(n^3) path.
double matrix_renyi_entropy_exact(const linalg::DenseSymmetricMatrix& m,
                                  const RenyiOrder& a,
                                  EigPolicy policy = EigPolicy::clip_to_zero,
                                  std::size_t oracle_cap = 4096);

/// Negative matrix Renyi entropy; larger is sharper.
double renyi_sharpness(const linalg::DenseSymmetricMatrix& m, const RenyiOrder& a,
                       EigPolicy policy = EigPolicy::clip_to_zero,
                       std::size_t oracle_cap = 4096);

struct InequalityCheck {
    bool holds;
    double slack; // (-H_alpha) - sum log p_i, nonnegative when the bound holds
};

/// Verifies sum_i log p_i <= -H_alpha(p). Requires strictly positive entries.
InequalityCheck check_logdet_inequality(const ProbVector& p, const RenyiOrder& a);

/// Power sum of a block-diagonal spectrum in factorized form:
/// sum_l w_l^alpha * sigma_alpha(block l) with w_l = trace_l / trace.
/// Equals the power sum of the concatenated normalized spectrum.
double blockdiag_power_sum(const std::vector<Spectrum>& blocks, const RenyiOrder& a);

} // namespace rsharp::entropy
