#include "btd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace btd {
namespace linalg {

namespace {

void check_nonempty(const Matrix& m, const char* op) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw DimensionError(std::string(op) + ": empty matrix");
  }
}

} // namespace

double default_rank_tol(const Matrix& m) {
  return 1e-12 * static_cast<double>(std::max(m.rows(), m.cols()));
}

SvdResult svd(const Matrix& m) {
  check_nonempty(m, "svd");
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdResult{dec.matrixU(), dec.singularValues(), dec.matrixV().transpose()};
}

Matrix pseudoinverse(const Matrix& m, double rank_tol) {
  check_nonempty(m, "pseudoinverse");
  if (rank_tol < 0.0) {
    throw ValidationError("pseudoinverse: rank_tol must be nonnegative");
  }
  SvdResult s = svd(m);
  const double cutoff = rank_tol * s.singular_values(0);
  Vector inv = Vector::Zero(s.singular_values.size());
  for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) {
    if (s.singular_values(i) > cutoff && s.singular_values(i) > 0.0) {
      inv(i) = 1.0 / s.singular_values(i);
    }
  }
  return s.vt.transpose() * inv.asDiagonal() * s.u.transpose();
}

Matrix pseudoinverse(const Matrix& m) {
  return pseudoinverse(m, default_rank_tol(m));
}

Eigen::Index numerical_rank(const Matrix& m, double rank_tol) {
  check_nonempty(m, "numerical_rank");
  Eigen::BDCSVD<Matrix> dec(m);
  const Vector& sv = dec.singularValues();
  const double cutoff = rank_tol * sv(0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) ++r;
  }
  return r;
}

Matrix solve_least_squares(const Matrix& a, const Matrix& b) {
  bool ignored = false;
  return solve_least_squares(a, b, ignored);
}

Matrix solve_least_squares(const Matrix& a, const Matrix& b, bool& rank_deficient) {
  check_nonempty(a, "solve_least_squares");
  if (a.rows() != b.rows()) {
    throw DimensionError("solve_least_squares: a has " + std::to_string(a.rows()) +
                         " rows, b has " + std::to_string(b.rows()));
  }
  // CompleteOrthogonalDecomposition returns the minimum-norm minimizer for
  // rank-deficient systems, matching the pinv(a)*b route.
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  cod.setThreshold(default_rank_tol(a));
  rank_deficient = cod.rank() < std::min(a.rows(), a.cols());
  return cod.solve(b);
}

GevdValues gevd_eigenvalues(const Matrix& m1, const Matrix& m2) {
  check_nonempty(m1, "gevd");
  if (m1.rows() != m1.cols() || m2.rows() != m2.cols() || m1.rows() != m2.rows()) {
    throw DimensionError("gevd: expected square matrices of equal size, got " +
                         std::to_string(m1.rows()) + "x" + std::to_string(m1.cols()) + " and " +
                         std::to_string(m2.rows()) + "x" + std::to_string(m2.cols()));
  }
  Eigen::GeneralizedEigenSolver<Matrix> ges(m1, m2, /*computeEigenvectors=*/false);
  if (ges.info() != Eigen::Success) {
    throw NumericalError("gevd: QZ iteration failed to converge");
  }
  return GevdValues{ges.alphas(), ges.betas()};
}

GevdResult gevd(const Matrix& m1, const Matrix& m2) {
  GevdValues vals = gevd_eigenvalues(m1, m2);
  // Eigen's own eigenvector path divides by zero on repeated eigenvalues, so
  // each eigenvector is recovered as the null direction of its shifted
  // pencil: the smallest right singular vector of beta*m1 - alpha*m2.
  const Eigen::Index n = m1.rows();
  Eigen::MatrixXcd c1 = m1.cast<std::complex<double>>();
  Eigen::MatrixXcd c2 = m2.cast<std::complex<double>>();
  Eigen::MatrixXcd vectors(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> alpha = vals.alphas(i);
    const double beta = vals.betas(i);
    const double scale = std::max(std::hypot(std::abs(alpha), std::abs(beta)), 1e-300);
    Eigen::MatrixXcd shifted = (beta / scale) * c1 - (alpha / scale) * c2;
    Eigen::JacobiSVD<Eigen::MatrixXcd> dec(shifted, Eigen::ComputeFullV);
    vectors.col(i) = dec.matrixV().col(n - 1);
  }
  return GevdResult{std::move(vals.alphas), std::move(vals.betas), std::move(vectors)};
}

} // namespace linalg
} // namespace btd
