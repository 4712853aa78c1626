#ifndef PPLDA_LINALG_HPP
#define PPLDA_LINALG_HPP

#include <cstddef>
#include <vector>

#include "pplda/errors.hpp"

namespace pplda {

using Vector = std::vector<double>;

// Small BLAS-1 helpers used throughout. Dimensions here are tiny
// (p rarely above 50), so clarity beats cleverness.
double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
Vector normalized(const Vector& a);
Vector scaled(const Vector& a, double s);
Vector sub(const Vector& a, const Vector& b);
Vector add(const Vector& a, const Vector& b);
void axpy(double s, const Vector& x, Vector& y); // y += s*x

/// Dense row-major matrix.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Vector col(std::size_t j) const;
    Vector row(std::size_t i) const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Vector matvec(const Matrix& a, const Vector& x);
Matrix outer(const Vector& a, const Vector& b);
double max_abs(const Matrix& a);

/// Square matrix constrained to be symmetric (checked on construction to
/// 1e-12 relative tolerance) with finite entries.
class SymmetricMatrix {
  public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(Matrix m);

    static SymmetricMatrix identity(std::size_t n);
    static SymmetricMatrix diagonal(const Vector& d);

    std::size_t dim() const { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& matrix() const { return m_; }

    double trace() const;

  private:
    Matrix m_;
};

Vector matvec(const SymmetricMatrix& a, const Vector& x);
double quadratic_form(const SymmetricMatrix& a, const Vector& x); // x'Ax

/// Result of a symmetric eigendecomposition: values sorted descending,
/// eigenvectors as the corresponding columns of `vectors`.
struct EigenDecomposition {
    Vector values;
    Matrix vectors;
};

/// Full eigendecomposition by cyclic Jacobi rotations. Deterministic and
/// dependency-free; intended for the small dimensions used here.
/// Eigenvector signs are canonicalized: the entry of largest magnitude is
/// made positive (lowest index on ties).
EigenDecomposition sym_eigen(const SymmetricMatrix& a);

/// Matrix square root A^{1/2} of a symmetric positive definite matrix.
/// Throws SingularityError when min eigenvalue <= 1e-12 * max eigenvalue.
SymmetricMatrix spd_sqrt(const SymmetricMatrix& a);

/// Inverse square root A^{-1/2}; same definiteness requirements as spd_sqrt.
/// The result R satisfies R A R = I.
SymmetricMatrix spd_inverse_sqrt(const SymmetricMatrix& a);

/// Closed-form inverse of A = sum_{j>=2} lambda_j w_j w_j' + w_1 w_1' C,
/// where the columns of `w` are orthonormal and `c` is SPD:
///
///   A^{-1} = B+ + (w_1' C w_1)^{-1} w_1 w_1' (I - C B+),
///
/// with B+ = sum_{j>=2} lambda_j^{-1} w_j w_j'. Such A (and its inverse)
/// is not symmetric in general, so a plain Matrix is returned.
/// `lambda` holds lambda_2..lambda_p (length p-1).
Matrix structured_rank1_inverse(const Vector& lambda, const Matrix& w,
                                const SymmetricMatrix& c);

/// Projector onto the orthogonal complement of span{v}: P = I - vv'/|v|^2.
SymmetricMatrix orthogonal_projector(const Vector& v);

/// Cholesky factorization of an SPD matrix, for repeated solves without
/// forming an explicit inverse.
class CholeskyFactor {
  public:
    explicit CholeskyFactor(const SymmetricMatrix& a);
    Vector solve(const Vector& b) const;
    std::size_t dim() const { return l_.rows(); }

  private:
    Matrix l_; // lower triangular
};

} // namespace pplda

#endif
