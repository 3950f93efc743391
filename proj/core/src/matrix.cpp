// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/matrix.hpp"

#include "rsharp/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rsharp::linalg {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> Matrix::matvec(std::span<const double> x) const {
    if (x.size() != cols_) throw ValidationError("matvec: dimension mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* row = data_.data() + i * cols_;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

DenseSymmetricMatrix::DenseSymmetricMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), data_(std::move(entries)) {
    if (data_.size() != n * n)
        throw ValidationError("DenseSymmetricMatrix: entries size != n*n");
    symmetrize_from_lower();
}

void DenseSymmetricMatrix::symmetrize_from_lower() {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j) data_[i * n_ + j] = data_[j * n_ + i];
}

std::vector<double> DenseSymmetricMatrix::matvec(std::span<const double> x) const {
    if (x.size() != n_) throw ValidationError("matvec: dimension mismatch");
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = data_.data() + i * n_;
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

double DenseSymmetricMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double DenseSymmetricMatrix::trace() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += data_[i * n_ + i];
    return s;
}

SymmetricOperator make_operator(const DenseSymmetricMatrix& m) {
    return SymmetricOperator{
        m.dim(),
        [m](std::span<const double> x, std::span<double> y) {
            auto r = m.matvec(x);
            std::copy(r.begin(), r.end(), y.begin());
        }};
}

TridiagonalMatrix::TridiagonalMatrix(std::vector<double> d, std::vector<double> e)
    : diag(std::move(d)), offdiag(std::move(e)) {
    if (diag.empty()) throw ValidationError("TridiagonalMatrix: empty diagonal");
    if (offdiag.size() + 1 != diag.size())
        throw ValidationError("TridiagonalMatrix: offdiag length must be diag length - 1");
}

double TridiagonalMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : diag) s += v * v;
    for (double v : offdiag) s += 2.0 * v * v;
    return std::sqrt(s);
}

DenseSymmetricMatrix TridiagonalMatrix::dense() const {
    const std::size_t m = diag.size();
    DenseSymmetricMatrix a(m);
    for (std::size_t i = 0; i < m; ++i) a(i, i) = diag[i];
    for (std::size_t i = 0; i + 1 < m; ++i) {
        a(i + 1, i) = offdiag[i];
        a(i, i + 1) = offdiag[i];
    }
    return a;
}

namespace {

constexpr char kSymfMagic[4] = {'S', 'Y', 'M', 'F'};

std::vector<double> parse_reals(const std::string& line) {
    std::string buf = line;
    for (char& c : buf)
        if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream iss(buf);
    std::vector<double> out;
    double v;
    while (iss >> v) out.push_back(v);
    return out;
}

} // namespace

DenseSymmetricMatrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open matrix file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto vals = parse_reals(line);
        if (!vals.empty()) rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ValidationError("empty matrix file: " + path);

    std::size_t start = 0;
    std::size_t n;
    if (rows[0].size() == 1 && rows.size() > 1 && rows[1].size() > 1) {
        // single-integer header row
        n = static_cast<std::size_t>(rows[0][0]);
        start = 1;
    } else {
        n = rows[0].size();
    }
    if (rows.size() - start != n)
        throw ValidationError("matrix file has wrong row count: " + path);
    std::vector<double> entries;
    entries.reserve(n * n);
    for (std::size_t i = start; i < rows.size(); ++i) {
        if (rows[i].size() != n)
            throw ValidationError("matrix file has ragged rows: " + path);
        entries.insert(entries.end(), rows[i].begin(), rows[i].end());
    }
    return DenseSymmetricMatrix(n, std::move(entries));
}

DenseSymmetricMatrix load_matrix_symf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open matrix file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kSymfMagic, 4) != 0)
        throw ValidationError("not a SYMF file: " + path);
    std::uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || n == 0) throw ValidationError("bad SYMF header: " + path);
    std::vector<double> entries(static_cast<std::size_t>(n) * n);
    in.read(reinterpret_cast<char*>(entries.data()),
            static_cast<std::streamsize>(entries.size() * sizeof(double)));
    if (!in) throw ValidationError("truncated SYMF file: " + path);
    return DenseSymmetricMatrix(n, std::move(entries));
}

DenseSymmetricMatrix load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open matrix file: " + path);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    in.close();
    if (std::memcmp(magic, kSymfMagic, 4) == 0) return load_matrix_symf(path);
    return load_matrix_csv(path);
}

void save_matrix_csv(const DenseSymmetricMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write matrix file: " + path);
    out.precision(17);
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

void save_matrix_symf(const DenseSymmetricMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write matrix file: " + path);
    out.write(kSymfMagic, 4);
    const std::uint32_t n = static_cast<std::uint32_t>(m.dim());
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(m.data().data()),
              static_cast<std::streamsize>(m.data().size() * sizeof(double)));
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
    for (double& v : x) v *= alpha;
}

} // namespace rsharp::linalg
