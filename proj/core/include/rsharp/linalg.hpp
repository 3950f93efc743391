// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rsharp/matrix.hpp"
#include "rsharp/rng.hpp"

#include <cstddef>
#include <vector>

namespace rsharp::linalg {

/// Eigendecomposition of a dense symmetric matrix. Eigenvalues descending,
/// eigenvectors as matching columns of an orthogonal basis.
struct EighResult {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

struct JacobiOptions {
    std::size_t max_sweeps = 50;
    double rel_tol = 1e-13; // stop when off(A) <= rel_tol * ||A||_F
};

/// Cyclic Jacobi rotations. Near machine precision, adequate up to the oracle
/// sizes this project cares about (n of a few hundred to ~2000).
/// Throws NumericalError with the residual if the sweep cap is exhausted.
EighResult dense_eigh(const DenseSymmetricMatrix& m, const JacobiOptions& opt = {});

/// Eigendecomposition of a symmetric tridiagonal matrix: Ritz values theta_i
/// (descending) and quadrature weights tau_i = (first eigenvector
/// component)^2. The tau_i are nonnegative and sum to 1.
struct TridiagEigh {
    std::vector<double> values;
    std::vector<double> weights;
    Matrix eigenvectors;
};

/// Implicit QL with Wilkinson shifts, eigenvectors accumulated.
TridiagEigh tridiag_eigh(const TridiagonalMatrix& t);

/// Gaussian direction normalized to the unit sphere.
std::vector<double> rand_unit_vector(SeededRng& rng, std::size_t n);

/// Entries +-1 with probability 1/2 each.
std::vector<double> rand_rademacher(SeededRng& rng, std::size_t n);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the R
/// diagonal signs folded into Q.
Matrix haar_orthogonal(SeededRng& rng, std::size_t n);

} // namespace rsharp::linalg
