#include "pplda/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pplda {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

} // namespace

double dot(const Vector& a, const Vector& b) {
    require(a.size() == b.size(), "dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

Vector normalized(const Vector& a) {
    const double n = norm(a);
    require(n > 0.0, "normalized: zero vector");
    return scaled(a, 1.0 / n);
}

Vector scaled(const Vector& a, double s) {
    Vector r(a);
    for (double& v : r) v *= s;
    return r;
}

Vector sub(const Vector& a, const Vector& b) {
    require(a.size() == b.size(), "sub: size mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vector add(const Vector& a, const Vector& b) {
    require(a.size() == b.size(), "add: size mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

void axpy(double s, const Vector& x, Vector& y) {
    require(x.size() == y.size(), "axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector Matrix::col(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

Vector Matrix::row(std::size_t i) const {
    Vector r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Vector matvec(const Matrix& a, const Vector& x) {
    require(a.cols() == x.size(), "matvec: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Matrix outer(const Vector& a, const Vector& b) {
    Matrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
    return m;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

SymmetricMatrix::SymmetricMatrix(Matrix m) : m_(std::move(m)) {
    require(m_.rows() == m_.cols(), "SymmetricMatrix: not square");
    const double scale = max_abs(m_);
    for (std::size_t i = 0; i < m_.rows(); ++i) {
        for (std::size_t j = 0; j < m_.cols(); ++j) {
            if (!std::isfinite(m_(i, j)))
                throw ValidationError("SymmetricMatrix: non-finite entry");
            if (j <= i) continue;
            const double asym = std::abs(m_(i, j) - m_(j, i));
            if (asym > 1e-12 * std::max(scale, 1e-300)) {
                std::ostringstream os;
                os << "SymmetricMatrix: entries (" << i << "," << j
                   << ") differ from their transpose by " << asym;
                throw ValidationError(os.str());
            }
            // Average away rounding-level asymmetry so downstream code sees
            // an exactly symmetric matrix.
            const double v = 0.5 * (m_(i, j) + m_(j, i));
            m_(i, j) = v;
            m_(j, i) = v;
        }
    }
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n) {
    return SymmetricMatrix(Matrix::identity(n));
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return SymmetricMatrix(std::move(m));
}

double SymmetricMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i);
    return t;
}

Vector matvec(const SymmetricMatrix& a, const Vector& x) { return matvec(a.matrix(), x); }

double quadratic_form(const SymmetricMatrix& a, const Vector& x) {
    return dot(x, matvec(a, x));
}

namespace {

double offdiag_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

double frobenius(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

} // namespace

EigenDecomposition sym_eigen(const SymmetricMatrix& sym) {
    const std::size_t n = sym.dim();
    Matrix a = sym.matrix();
    Matrix v = Matrix::identity(n);

    const double fro = frobenius(a);
    const double tol = 1e-15 * std::max(fro, 1e-300);
    const int max_sweeps = 64;

    for (int sweep = 0; sweep < max_sweeps && offdiag_norm(a) > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                // Symmetric Schur decomposition of the 2x2 block.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (theta >= 0.0)
                    t = 1.0 / (theta + std::sqrt(1.0 + theta * theta));
                else
                    t = -1.0 / (-theta + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition dec;
    dec.values.resize(n);
    dec.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        dec.values[j] = a(order[j], order[j]);
        std::size_t imax = 0;
        double vmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = std::abs(v(i, order[j]));
            if (x > vmax) {
                vmax = x;
                imax = i;
            }
        }
        const double sgn = v(imax, order[j]) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) dec.vectors(i, j) = sgn * v(i, order[j]);
    }
    return dec;
}

namespace {

// Shared eigenvalue-power transform for spd_sqrt / spd_inverse_sqrt.
SymmetricMatrix spd_eigen_power(const SymmetricMatrix& a, double exponent,
                                const char* op_name) {
    const EigenDecomposition dec = sym_eigen(a);
    const double lmax = dec.values.front();
    const double floor = 1e-12 * std::max(lmax, 0.0);
    for (std::size_t j = 0; j < dec.values.size(); ++j) {
        if (dec.values[j] <= floor) {
            std::ostringstream os;
            os << op_name << ": matrix is not positive definite (eigenvalue "
               << dec.values[j] << " at position " << j << " versus maximum " << lmax
               << ")";
            throw SingularityError(os.str());
        }
    }
    const std::size_t n = a.dim();
    Matrix r(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double f = std::pow(dec.values[j], exponent);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                r(i, k) += f * dec.vectors(i, j) * dec.vectors(k, j);
    }
    return SymmetricMatrix(std::move(r));
}

} // namespace

SymmetricMatrix spd_sqrt(const SymmetricMatrix& a) {
    return spd_eigen_power(a, 0.5, "spd_sqrt");
}

SymmetricMatrix spd_inverse_sqrt(const SymmetricMatrix& a) {
    return spd_eigen_power(a, -0.5, "spd_inverse_sqrt");
}

Matrix structured_rank1_inverse(const Vector& lambda, const Matrix& w,
                                const SymmetricMatrix& c) {
    const std::size_t p = w.rows();
    require(w.cols() == p, "structured_rank1_inverse: w must be square");
    require(lambda.size() + 1 == p, "structured_rank1_inverse: need p-1 lambdas");
    require(c.dim() == p, "structured_rank1_inverse: dimension mismatch");

    // Orthonormality of the w columns.
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            const double g = dot(w.col(i), w.col(j));
            const double want = (i == j) ? 1.0 : 0.0;
            require(std::abs(g - want) < 1e-8,
                    "structured_rank1_inverse: columns of w are not orthonormal");
        }
    }
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        if (std::abs(lambda[j]) < 1e-300) {
            std::ostringstream os;
            os << "structured_rank1_inverse: lambda_" << (j + 2) << " is zero";
            throw SingularityError(os.str());
        }
    }
    const Vector w1 = w.col(0);
    const double w1cw1 = quadratic_form(c, w1);
    if (!(w1cw1 > 0.0))
        throw SingularityError("structured_rank1_inverse: w1' C w1 is not positive");

    Matrix b_pinv(p, p);
    for (std::size_t j = 1; j < p; ++j) {
        const double f = 1.0 / lambda[j - 1];
        const Vector wj = w.col(j);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t k = 0; k < p; ++k) b_pinv(i, k) += f * wj[i] * wj[k];
    }

    // I - C B+
    Matrix icb = matmul(c.matrix(), b_pinv);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) icb(i, j) = (i == j ? 1.0 : 0.0) - icb(i, j);

    Matrix correction = matmul(outer(w1, w1), icb);
    Matrix inv(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            inv(i, j) = b_pinv(i, j) + correction(i, j) / w1cw1;
    return inv;
}

SymmetricMatrix orthogonal_projector(const Vector& v) {
    const double n2 = dot(v, v);
    if (!(n2 > 0.0)) throw ValidationError("orthogonal_projector: zero vector");
    const std::size_t p = v.size();
    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            m(i, j) = (i == j ? 1.0 : 0.0) - v[i] * v[j] / n2;
    return SymmetricMatrix(std::move(m));
}

CholeskyFactor::CholeskyFactor(const SymmetricMatrix& a) : l_(a.dim(), a.dim()) {
    const std::size_t n = a.dim();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
        if (!(d > 0.0)) {
            std::ostringstream os;
            os << "Cholesky: non-positive pivot " << d << " at column " << j;
            throw SingularityError(os.str());
        }
        l_(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
            l_(i, j) = s / l_(j, j);
        }
    }
}

Vector CholeskyFactor::solve(const Vector& b) const {
    const std::size_t n = l_.rows();
    if (b.size() != n) throw ValidationError("CholeskyFactor::solve: size mismatch");
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * y[k];
        y[i] = s / l_(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * x[k];
        x[ii] = s / l_(ii, ii);
    }
    return x;
}

} // namespace pplda
