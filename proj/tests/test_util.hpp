#ifndef PPLDA_TESTS_TEST_UTIL_HPP
#define PPLDA_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <cstdint>

#include "pplda/linalg.hpp"
#include "pplda/mixture.hpp"
#include "pplda/rng.hpp"

namespace pplda::testutil {

inline Vector random_vector(Rng& rng, std::size_t p, double scale = 1.0) {
    Vector v(p);
    for (double& x : v) x = scale * rng.next_gaussian();
    return v;
}

inline Vector random_unit(Rng& rng, std::size_t p) {
    Vector v;
    do {
        v = random_vector(rng, p);
    } while (norm(v) == 0.0);
    return normalized(v);
}

/// Random SPD matrix A = G G' + ridge I with G gaussian.
inline SymmetricMatrix random_spd(Rng& rng, std::size_t p, double ridge = 0.5) {
    Matrix g(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) g(i, j) = rng.next_gaussian();
    Matrix a = matmul(g, transpose(g));
    for (std::size_t i = 0; i < p; ++i) a(i, i) += ridge;
    return SymmetricMatrix(std::move(a));
}

/// Random orthonormal columns via Gram-Schmidt on gaussian draws.
inline Matrix random_orthonormal(Rng& rng, std::size_t p) {
    Matrix q(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        Vector v;
        double nv = 0.0;
        do {
            v = random_vector(rng, p);
            for (std::size_t k = 0; k < j; ++k) {
                const Vector qk = q.col(k);
                axpy(-dot(v, qk), qk, v);
            }
            nv = norm(v);
        } while (nv < 1e-8);
        for (std::size_t i = 0; i < p; ++i) q(i, j) = v[i] / nv;
    }
    return q;
}

/// Independent dense-inverse oracle: Gauss-Jordan with partial pivoting.
inline Matrix dense_inverse(Matrix a) {
    const std::size_t n = a.rows();
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-300)
            throw std::runtime_error("dense_inverse: singular");
        if (piv != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a(piv, c), a(col, c));
                std::swap(inv(piv, c), inv(col, c));
            }
        const double d = a(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a(col, c) /= d;
            inv(col, c) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

inline double frobenius(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

inline double rel_frobenius_diff(const Matrix& a, const Matrix& b) {
    double diff = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double d = a(i, j) - b(i, j);
            diff += d * d;
        }
    const double scale = std::max(frobenius(a), 1e-300);
    return std::sqrt(diff) / scale;
}

/// Random non-degenerate mixture: alpha1 kept away from the proportions
/// where one of the indices loses all information.
inline MixtureModel random_model(Rng& rng, std::size_t p, double min_dist = 0.02) {
    const double bad[3] = {0.5 - 1.0 / std::sqrt(12.0), 0.5,
                           0.5 + 1.0 / std::sqrt(12.0)};
    double alpha1;
    for (;;) {
        alpha1 = 0.05 + 0.9 * rng.next_double();
        bool ok = true;
        for (double b : bad) ok = ok && std::abs(alpha1 - b) > min_dist;
        if (ok) break;
    }
    const SymmetricMatrix sigma = random_spd(rng, p);
    Vector mu1 = random_vector(rng, p, 0.5);
    Vector mu2;
    do {
        mu2 = random_vector(rng, p, 1.0);
    } while (norm(sub(mu2, mu1)) < 0.3);
    return MixtureModel(alpha1, std::move(mu1), std::move(mu2), sigma);
}

} // namespace pplda::testutil

#endif
