// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rsharp::linalg {

/// Dense row-major matrix. Small and unclever on purpose; everything in this
/// project that is big is matrix-free.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix identity(std::size_t n);

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    std::vector<double> matvec(std::span<const double> x) const;
    Matrix transposed() const;
    double frobenius_norm() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// Symmetric dense matrix with full storage. The lower triangle is
/// authoritative: construction mirrors it onto the upper triangle, so
/// entries(i,j) == entries(j,i) always holds afterwards.
class DenseSymmetricMatrix {
public:
    DenseSymmetricMatrix() = default;
    explicit DenseSymmetricMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
    /// `entries` is n*n row-major; the upper triangle is overwritten from the
    /// lower one.
    DenseSymmetricMatrix(std::size_t n, std::vector<double> entries);

    std::size_t dim() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    std::span<const double> data() const { return data_; }

    /// Re-mirror the lower triangle after in-place edits.
    void symmetrize_from_lower();

    std::vector<double> matvec(std::span<const double> x) const;
    double frobenius_norm() const;
    double trace() const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Symmetric linear operator exposed only through matrix-vector products.
/// `apply` must be deterministic; symmetry is checked by test witnesses, not
/// enforced here.
struct SymmetricOperator {
    std::size_t dim = 0;
    std::function<void(std::span<const double>, std::span<double>)> apply;

    std::vector<double> operator()(std::span<const double> x) const {
        std::vector<double> y(dim, 0.0);
        apply(x, y);
        return y;
    }
};

SymmetricOperator make_operator(const DenseSymmetricMatrix& m);

/// Symmetric tridiagonal matrix: diag alpha_1..alpha_m, offdiag beta_1..beta_{m-1}.
struct TridiagonalMatrix {
    std::vector<double> diag;
    std::vector<double> offdiag;

    TridiagonalMatrix() = default;
    TridiagonalMatrix(std::vector<double> d, std::vector<double> e);

    std::size_t dim() const { return diag.size(); }
    double frobenius_norm() const;
    DenseSymmetricMatrix dense() const;
};

// --- file formats -----------------------------------------------------------
//
// CSV: optional single-integer header row with n, then whitespace- or
// comma-delimited reals, n per row. Binary: magic "SYMF", u32 n (little
// endian), n*n f64 row-major little endian. Loaders mirror the lower triangle.

DenseSymmetricMatrix load_matrix_csv(const std::string& path);
DenseSymmetricMatrix load_matrix_symf(const std::string& path);
/// Sniffs the SYMF magic and dispatches.
DenseSymmetricMatrix load_matrix(const std::string& path);

void save_matrix_csv(const DenseSymmetricMatrix& m, const std::string& path);
void save_matrix_symf(const DenseSymmetricMatrix& m, const std::string& path);

// --- small vector helpers (used all over the numeric code) ------------------

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

} // namespace rsharp::linalg
