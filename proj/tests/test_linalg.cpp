// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/linalg.hpp"

#include "rsharp/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace rsharp;
using linalg::DenseSymmetricMatrix;
using linalg::Matrix;
using linalg::SeededRng;
using linalg::TridiagonalMatrix;

namespace {

DenseSymmetricMatrix random_symmetric(SeededRng& rng, std::size_t n) {
    DenseSymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) m(i, j) = rng.normal();
    m.symmetrize_from_lower();
    return m;
}

DenseSymmetricMatrix spd_with_spectrum(SeededRng& rng, const std::vector<double>& lam) {
    const std::size_t n = lam.size();
    const auto q = linalg::haar_orthogonal(rng, n);
    DenseSymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += q(i, k) * lam[k] * q(j, k);
            m(i, j) = acc;
        }
    m.symmetrize_from_lower();
    return m;
}

} // namespace

TEST_SUITE_BEGIN("linalg");

TEST_CASE("dense_eigh: identity") {
    DenseSymmetricMatrix m(3);
    for (int i = 0; i < 3; ++i) m(i, i) = 1.0;
    const auto r = linalg::dense_eigh(m);
    for (double v : r.eigenvalues) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("dense_eigh: diagonal sorts descending") {
    DenseSymmetricMatrix m(3);
    m(0, 0) = 3.0;
    m(1, 1) = 1.0;
    m(2, 2) = 2.0;
    const auto r = linalg::dense_eigh(m);
    CHECK(r.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(r.eigenvalues[1] == doctest::Approx(2.0));
    CHECK(r.eigenvalues[2] == doctest::Approx(1.0));
}

TEST_CASE("dense_eigh: reconstruction and orthogonality on random 8x8") {
    SeededRng rng(42, 0);
    const auto m = random_symmetric(rng, 8);
    const auto r = linalg::dense_eigh(m);
    const auto& q = r.eigenvectors;

    double max_err = 0.0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            double rec = 0.0;
            for (std::size_t k = 0; k < 8; ++k)
                rec += q(i, k) * r.eigenvalues[k] * q(j, k);
            max_err = std::max(max_err, std::abs(rec - m(i, j)));
        }
    CHECK(max_err <= 1e-10);

    for (std::size_t a = 0; a < 8; ++a)
        for (std::size_t b = 0; b < 8; ++b) {
            double g = 0.0;
            for (std::size_t k = 0; k < 8; ++k) g += q(k, a) * q(k, b);
            CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) <= 1e-10);
        }
}

TEST_CASE("dense_eigh: residual contract ||MQ-QL|| <= 1e-10 n ||M||") {
    SeededRng rng(7, 0);
    for (std::size_t n : {4u, 16u, 40u}) {
        const auto m = random_symmetric(rng, n);
        const auto r = linalg::dense_eigh(m);
        double fro = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double mq = 0.0;
                for (std::size_t k = 0; k < n; ++k) mq += m(i, k) * r.eigenvectors(k, j);
                const double ql = r.eigenvectors(i, j) * r.eigenvalues[j];
                fro += (mq - ql) * (mq - ql);
            }
        }
        CHECK(std::sqrt(fro) <= 1e-10 * static_cast<double>(n) * m.frobenius_norm());
    }
}

TEST_CASE("dense_eigh: sweep cap reports residual") {
    SeededRng rng(3, 0);
    const auto m = random_symmetric(rng, 16);
    linalg::JacobiOptions opt;
    opt.max_sweeps = 1;
    opt.rel_tol = 1e-15;
    CHECK_THROWS_AS(linalg::dense_eigh(m, opt), NumericalError);
    try {
        linalg::dense_eigh(m, opt);
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("residual") != std::string::npos);
    }
}

TEST_CASE("tridiag_eigh: 1x1") {
    const auto r = linalg::tridiag_eigh(TridiagonalMatrix({5.0}, {}));
    CHECK(r.values[0] == doctest::Approx(5.0));
    CHECK(r.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("tridiag_eigh: decoupled diagonal") {
    const auto r = linalg::tridiag_eigh(TridiagonalMatrix({2.0, 2.0}, {0.0}));
    CHECK(r.values[0] == doctest::Approx(2.0));
    CHECK(r.values[1] == doctest::Approx(2.0));
    CHECK(r.weights[0] + r.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tridiag_eigh: 2x2 closed form") {
    // [[0,1],[1,0]] has eigenpairs (+1, (1,1)/sqrt2), (-1, (1,-1)/sqrt2)
    const auto r = linalg::tridiag_eigh(TridiagonalMatrix({0.0, 0.0}, {1.0}));
    CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.values[1] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("tridiag_eigh: weights sum to 1, residual small") {
    SeededRng rng(9, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 2 + rng.next_below(30);
        std::vector<double> d(m), e(m - 1);
        for (auto& v : d) v = rng.normal();
        for (auto& v : e) v = rng.normal();
        TridiagonalMatrix t(d, e);
        const auto r = linalg::tridiag_eigh(t);

        double wsum = 0.0;
        for (double w : r.weights) {
            CHECK(w >= 0.0);
            wsum += w;
        }
        CHECK(std::abs(wsum - 1.0) <= 1e-10);

        const auto dense = t.dense();
        double fro = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double tq = 0.0;
                for (std::size_t k = 0; k < m; ++k) tq += dense(i, k) * r.eigenvectors(k, j);
                const double ql = r.eigenvectors(i, j) * r.values[j];
                fro += (tq - ql) * (tq - ql);
            }
        CHECK(std::sqrt(fro) <= 1e-10 * static_cast<double>(m) * t.frobenius_norm());
    }
}

TEST_CASE("tridiag_eigh: matches dense oracle") {
    SeededRng rng(21, 0);
    std::vector<double> d(12), e(11);
    for (auto& v : d) v = rng.normal();
    for (auto& v : e) v = rng.normal();
    TridiagonalMatrix t(d, e);
    const auto viaql = linalg::tridiag_eigh(t);
    const auto viajacobi = linalg::dense_eigh(t.dense());
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(viaql.values[i] == doctest::Approx(viajacobi.eigenvalues[i]).epsilon(1e-11));
}

TEST_CASE("rand_unit_vector: unit norm and 1-d support") {
    SeededRng rng(1, 0);
    const auto v1 = linalg::rand_unit_vector(rng, 1);
    CHECK((v1[0] == doctest::Approx(1.0) || v1[0] == doctest::Approx(-1.0)));
    for (std::size_t n : {2u, 5u, 64u}) {
        auto v = linalg::rand_unit_vector(rng, n);
        CHECK(std::abs(linalg::norm2(v) - 1.0) <= 1e-12);
    }
}

TEST_CASE("rand_unit_vector: determinism under (seed, stream)") {
    SeededRng a(42, 0), b(42, 0), c(42, 1);
    const auto va = linalg::rand_unit_vector(a, 16);
    const auto vb = linalg::rand_unit_vector(b, 16);
    const auto vc = linalg::rand_unit_vector(c, 16);
    CHECK(va == vb); // bit-identical
    CHECK(va != vc);
}

TEST_CASE("rand_rademacher: support, identity quadratic form, mean bound") {
    SeededRng rng(5, 0);
    const auto v = linalg::rand_rademacher(rng, 4);
    for (double x : v) CHECK((x == 1.0 || x == -1.0));

    // v^T I v == n exactly for every draw
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = linalg::rand_rademacher(rng, 33);
        CHECK(linalg::dot(w, w) == 33.0);
    }

    // E[v_i] -> 0 within 3 sigma over 1e4 draws
    const int draws = 10000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += linalg::rand_rademacher(rng, 1)[0];
    CHECK(std::abs(sum / draws) <= 3.0 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("haar_orthogonal: orthogonality, det, column norms") {
    SeededRng rng(12, 0);
    const auto a1 = linalg::haar_orthogonal(rng, 1);
    CHECK((a1(0, 0) == doctest::Approx(1.0) || a1(0, 0) == doctest::Approx(-1.0)));

    const std::size_t n = 12;
    const auto q = linalg::haar_orthogonal(rng, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double g = 0.0;
            for (std::size_t k = 0; k < n; ++k) g += q(k, i) * q(k, j);
            CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-10);
        }
    for (std::size_t j = 0; j < n; ++j) {
        double c = 0.0;
        for (std::size_t k = 0; k < n; ++k) c += q(k, j) * q(k, j);
        CHECK(std::abs(std::sqrt(c) - 1.0) <= 1e-12);
    }
    // |det| = 1: product of eigenvalue magnitudes of Q^T Q is 1 by the Gram
    // check above; verify via the spectrum of the symmetric part being bounded
    // is weaker, so use an LU-free route: det(Q)^2 = det(Q^T Q) = 1.
    // The Gram identity already pins it; nothing further to assert here.
}

TEST_CASE("matrix io: csv and symf round trips") {
    SeededRng rng(33, 0);
    const auto m = random_symmetric(rng, 6);
    const auto dir = std::filesystem::temp_directory_path();
    const auto csv = (dir / "rsharp_test_matrix.csv").string();
    const auto bin = (dir / "rsharp_test_matrix.symf").string();

    linalg::save_matrix_csv(m, csv);
    const auto m1 = linalg::load_matrix(csv);
    REQUIRE(m1.dim() == m.dim());
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            CHECK(m1(i, j) == doctest::Approx(m(i, j)).epsilon(1e-15));

    linalg::save_matrix_symf(m, bin);
    const auto m2 = linalg::load_matrix(bin);
    REQUIRE(m2.dim() == m.dim());
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) CHECK(m2(i, j) == m(i, j)); // bit exact

    std::filesystem::remove(csv);
    std::filesystem::remove(bin);
}

TEST_CASE("matrix io: csv header row and lower-triangle mirroring") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = (dir / "rsharp_test_header.csv").string();
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("2\n1.0, 99.0\n0.5, 3.0\n", f); // upper entry ignored
        std::fclose(f);
    }
    const auto m = linalg::load_matrix(path);
    REQUIRE(m.dim() == 2);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(1, 1) == 3.0);
    CHECK(m(0, 1) == 0.5); // mirrored from the lower triangle
    CHECK(m(1, 0) == 0.5);
    std::filesystem::remove(path);
}

TEST_CASE("symmetric operator witness on dense matvec") {
    SeededRng rng(8, 0);
    const auto m = random_symmetric(rng, 24);
    const auto op = linalg::make_operator(m);
    const auto u = linalg::rand_unit_vector(rng, 24);
    const auto v = linalg::rand_unit_vector(rng, 24);
    const double lhs = linalg::dot(u, op(v));
    const double rhs = linalg::dot(v, op(u));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * m.frobenius_norm());
}

TEST_CASE("spd spectrum construction sanity") {
    SeededRng rng(55, 0);
    std::vector<double> lam{9.0, 4.0, 1.0, 0.5};
    const auto m = spd_with_spectrum(rng, lam);
    const auto r = linalg::dense_eigh(m);
    for (std::size_t i = 0; i < lam.size(); ++i)
        CHECK(r.eigenvalues[i] == doctest::Approx(lam[i]).epsilon(1e-10));
}

TEST_SUITE_END();
