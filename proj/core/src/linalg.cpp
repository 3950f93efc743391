// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/linalg.hpp"

#include "rsharp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rsharp::linalg {

namespace {

double offdiag_norm(const DenseSymmetricMatrix& a) {
    const std::size_t n = a.dim();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

void sort_descending(std::vector<double>& values, Matrix& vectors) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> sorted(n);
    Matrix perm(vectors.rows(), n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted[k] = values[order[k]];
        for (std::size_t i = 0; i < vectors.rows(); ++i) perm(i, k) = vectors(i, order[k]);
    }
    values = std::move(sorted);
    vectors = std::move(perm);
}

} // namespace

EighResult dense_eigh(const DenseSymmetricMatrix& m, const JacobiOptions& opt) {
    const std::size_t n = m.dim();
    if (n == 0) throw ValidationError("dense_eigh: empty matrix");

    DenseSymmetricMatrix a = m;
    Matrix v = Matrix::identity(n);
    const double fro = m.frobenius_norm();
    if (fro == 0.0) {
        return EighResult{std::vector<double>(n, 0.0), std::move(v)};
    }

    double off = offdiag_norm(a);
    std::size_t sweep = 0;
    for (; sweep < opt.max_sweeps && off > opt.rel_tol * fro; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Skip rotations that cannot change anything at this scale.
                if (std::abs(apq) < 1e-300) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e15) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = a(p, k) = c * akp - s * akq;
                    a(k, q) = a(q, k) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        off = offdiag_norm(a);
    }
    if (off > opt.rel_tol * fro) {
        std::ostringstream msg;
        msg << "dense_eigh: Jacobi did not converge in " << opt.max_sweeps
            << " sweeps; off-diagonal residual " << off << " (target "
            << opt.rel_tol * fro << ")";
        throw NumericalError(msg.str());
    }

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    sort_descending(values, v);
    return EighResult{std::move(values), std::move(v)};
}

TridiagEigh tridiag_eigh(const TridiagonalMatrix& t) {
    const std::size_t m = t.dim();
    std::vector<double> d = t.diag;
    std::vector<double> e(m, 0.0);
    std::copy(t.offdiag.begin(), t.offdiag.end(), e.begin());
    Matrix z = Matrix::identity(m);
    const int max_iter = 50;
    const double eps = std::numeric_limits<double>::epsilon();

    for (std::size_t l = 0; l < m; ++l) {
        int iter = 0;
        std::size_t mm;
        do {
            for (mm = l; mm + 1 < m; ++mm) {
                const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= eps * dd) break;
            }
            if (mm != l) {
                if (iter++ == max_iter)
                    throw NumericalError("tridiag_eigh: implicit QL exceeded iteration cap");
                // Wilkinson shift.
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = mm; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[mm] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < m; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[mm] = 0.0;
            }
        } while (mm != l);
    }

    sort_descending(d, z);
    std::vector<double> weights(m);
    for (std::size_t i = 0; i < m; ++i) weights[i] = z(0, i) * z(0, i);
    return TridiagEigh{std::move(d), std::move(weights), std::move(z)};
}

std::vector<double> rand_unit_vector(SeededRng& rng, std::size_t n) {
    if (n == 0) throw ValidationError("rand_unit_vector: n must be positive");
    std::vector<double> v(n);
    double norm = 0.0;
    do {
        for (auto& x : v) x = rng.normal();
        norm = norm2(v);
    } while (norm == 0.0);
    scale(1.0 / norm, v);
    return v;
}

std::vector<double> rand_rademacher(SeededRng& rng, std::size_t n) {
    if (n == 0) throw ValidationError("rand_rademacher: n must be positive");
    std::vector<double> v(n);
    for (auto& x : v) x = (rng.next_u64() & 1u) ? 1.0 : -1.0;
    return v;
}

Matrix haar_orthogonal(SeededRng& rng, std::size_t n) {
    if (n == 0) throw ValidationError("haar_orthogonal: n must be positive");
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.normal();

    // Householder QR; Q assembled explicitly, then the signs of diag(R) are
    // folded in so the distribution is exactly Haar.
    Matrix q = Matrix::identity(n);
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k; i < n; ++i) xnorm += a(i, k) * a(i, k);
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const double alpha = a(k, k) >= 0.0 ? -xnorm : xnorm;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            w[i] = a(i, k);
            if (i == k) w[i] -= alpha;
            vnorm2 += w[i] * w[i];
        }
        if (vnorm2 == 0.0) continue;
        // Apply H = I - 2 w w^T / (w^T w) to A (columns k..) and to Q.
        for (std::size_t j = k; j < n; ++j) {
            double proj = 0.0;
            for (std::size_t i = k; i < n; ++i) proj += w[i] * a(i, j);
            proj *= 2.0 / vnorm2;
            for (std::size_t i = k; i < n; ++i) a(i, j) -= proj * w[i];
        }
        for (std::size_t j = 0; j < n; ++j) {
            double proj = 0.0;
            for (std::size_t i = k; i < n; ++i) proj += w[i] * q(i, j);
            proj *= 2.0 / vnorm2;
            for (std::size_t i = k; i < n; ++i) q(i, j) -= proj * w[i];
        }
    }
    // q now holds Q^T (product of reflectors applied to I); transpose and
    // sign-correct columns by diag(R).
    Matrix qt = q.transposed();
    for (std::size_t j = 0; j < n; ++j) {
        if (a(j, j) < 0.0)
            for (std::size_t i = 0; i < n; ++i) qt(i, j) = -qt(i, j);
    }
    return qt;
}

} // namespace rsharp::linalg
