#pragma once

#include <complex>

#include <Eigen/Core>

#include "btd/tensor.hpp"

namespace btd {
namespace linalg {

/// Thin SVD, m = u * diag(singular_values) * vt. Singular values are
/// nonincreasing and nonnegative.
struct SvdResult {
  Matrix u;
  Vector singular_values;
  Matrix vt;
};

/// Generalized eigendecomposition of the pencil (m1, m2): m1*v = (alpha/beta)*m2*v.
/// Eigenvalues are reported in (alpha, beta) form so that a singular m2 shows up
/// as beta near zero (an infinite eigenvalue) instead of an overflow.
struct GevdResult {
  Eigen::VectorXcd alphas;
  Vector betas;
  Eigen::MatrixXcd eigenvectors; // right eigenvectors, one per column

  std::complex<double> eigenvalue(Eigen::Index i) const { return alphas(i) / betas(i); }
};

/// Machine-precision-scaled default cutoff for rank decisions: singular values
/// below rank_tol * sigma_max are treated as zero.
double default_rank_tol(const Matrix& m);

SvdResult svd(const Matrix& m);

/// Moore-Penrose pseudoinverse via SVD, discarding singular values below
/// rank_tol * (largest singular value).
Matrix pseudoinverse(const Matrix& m, double rank_tol);
Matrix pseudoinverse(const Matrix& m);

/// Numerical rank with the same cutoff convention as pseudoinverse.
Eigen::Index numerical_rank(const Matrix& m, double rank_tol);

/// Minimum-norm least-squares solution X of min ||a*X - b||_F.
Matrix solve_least_squares(const Matrix& a, const Matrix& b);

/// Same, but also reports whether `a` was rank deficient at the default cutoff.
Matrix solve_least_squares(const Matrix& a, const Matrix& b, bool& rank_deficient);

/// QZ-based solve of the generalized eigenproblem for a pair of square real
/// matrices of equal size.
GevdResult gevd(const Matrix& m1, const Matrix& m2);

/// (alpha, beta) pairs only, skipping the eigenvector extraction.
struct GevdValues {
  Eigen::VectorXcd alphas;
  Vector betas;
};
GevdValues gevd_eigenvalues(const Matrix& m1, const Matrix& m2);

} // namespace linalg
} // namespace btd
