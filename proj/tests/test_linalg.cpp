#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>

#include "btd/linalg.hpp"
#include "btd/rng.hpp"
#include "test_support.hpp"

using namespace btd;
using namespace btd::linalg;

TEST_CASE("svd reconstructs random matrices up to 200x200") {
  auto rng = make_rng(41);
  for (auto [r, c] : {std::pair{200, 200}, std::pair{50, 80}, std::pair{80, 50}}) {
    Matrix m = random_gaussian(r, c, rng);
    SvdResult s = svd(m);
    Matrix rec = s.u * s.singular_values.asDiagonal() * s.vt;
    CHECK(test_support::rel_diff(rec, m) < 1e-8);
    CHECK((s.u.transpose() * s.u - Matrix::Identity(s.u.cols(), s.u.cols())).norm() < 1e-8);
    CHECK((s.vt * s.vt.transpose() - Matrix::Identity(s.vt.rows(), s.vt.rows())).norm() < 1e-8);
    CHECK(std::is_sorted(s.singular_values.data(),
                         s.singular_values.data() + s.singular_values.size(),
                         std::greater<double>()));
  }
}

TEST_CASE("pseudoinverse of identity and of a singular diagonal") {
  Matrix eye = Matrix::Identity(4, 4);
  CHECK((pseudoinverse(eye) - eye).norm() < 1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  Matrix p = pseudoinverse(d);
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p(1, 1) == 0.0);
  CHECK(p(0, 1) == 0.0);
}

TEST_CASE("pseudoinverse of a full-column-rank matrix is a left inverse") {
  auto rng = make_rng(43);
  Matrix m = random_gaussian(6, 3, rng);
  CHECK((pseudoinverse(m) * m - Matrix::Identity(3, 3)).norm() < 1e-8);
}

TEST_CASE("pseudoinverse satisfies the Penrose conditions") {
  auto rng = make_rng(47);
  Matrix full = random_gaussian(7, 5, rng);
  Matrix deficient = random_gaussian(7, 3, rng) * random_gaussian(3, 5, rng);
  for (const Matrix& m : {full, deficient}) {
    Matrix p = pseudoinverse(m);
    CHECK(test_support::rel_diff(m * p * m, m) < 1e-8);
    CHECK(test_support::rel_diff(p * m * p, p) < 1e-8);
    CHECK(((m * p) - (m * p).transpose()).norm() < 1e-8 * std::max(1.0, (m * p).norm()));
    CHECK(((p * m) - (p * m).transpose()).norm() < 1e-8 * std::max(1.0, (p * m).norm()));
  }
}

TEST_CASE("pseudoinverse rejects empty input and negative tolerance") {
  CHECK_THROWS_AS(pseudoinverse(Matrix()), DimensionError);
  CHECK_THROWS_AS(pseudoinverse(Matrix::Identity(2, 2), -1.0), ValidationError);
}

TEST_CASE("least squares with identity and nonsingular systems") {
  auto rng = make_rng(53);
  Matrix b = random_gaussian(5, 2, rng);
  CHECK((solve_least_squares(Matrix::Identity(5, 5), b) - b).norm() < 1e-14);

  Matrix a = random_gaussian(6, 6, rng);
  Matrix x = solve_least_squares(a, b.topRows(6).eval());
  Matrix rhs = random_gaussian(6, 3, rng);
  x = solve_least_squares(a, rhs);
  CHECK((a * x - rhs).norm() < 1e-10 * rhs.norm());
}

TEST_CASE("least squares on rank-deficient systems returns the minimum-norm solution") {
  auto rng = make_rng(59);
  Matrix a = random_gaussian(8, 3, rng) * random_gaussian(3, 5, rng); // rank 3
  Matrix b = random_gaussian(8, 2, rng);
  bool rank_deficient = false;
  Matrix x = solve_least_squares(a, b, rank_deficient);
  CHECK(rank_deficient);
  Matrix via_pinv = pseudoinverse(a) * b;
  CHECK(test_support::rel_diff(x, via_pinv) < 1e-8);
}

TEST_CASE("least-squares residual is orthogonal to the column space") {
  auto rng = make_rng(61);
  Matrix a = random_gaussian(9, 4, rng);
  Matrix b = random_gaussian(9, 2, rng);
  Matrix x = solve_least_squares(a, b);
  Matrix resid = a * x - b;
  CHECK((a.transpose() * resid).norm() < 1e-8 * std::max(1.0, a.norm() * b.norm()));
  CHECK_THROWS_AS(solve_least_squares(a, random_gaussian(8, 2, rng)), DimensionError);
}

TEST_CASE("gevd against the identity reproduces ordinary eigenvalues") {
  auto rng = make_rng(67);
  Matrix m = random_gaussian(5, 5, rng);
  GevdResult g = gevd(m, Matrix::Identity(5, 5));

  Eigen::EigenSolver<Matrix> es(m);
  std::vector<std::complex<double>> want(es.eigenvalues().data(), es.eigenvalues().data() + 5);
  std::vector<std::complex<double>> got;
  for (Eigen::Index i = 0; i < 5; ++i) got.push_back(g.eigenvalue(i));
  auto by_parts = [](const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  std::sort(want.begin(), want.end(), by_parts);
  std::sort(got.begin(), got.end(), by_parts);
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(std::abs(want[i] - got[i]) < 1e-8 * (1.0 + std::abs(want[i])));
  }
}

TEST_CASE("gevd of diagonal pairs") {
  Matrix m1 = Matrix::Zero(2, 2);
  m1(0, 0) = 2.0;
  m1(1, 1) = 3.0;
  GevdResult g = gevd(m1, Matrix::Identity(2, 2));
  std::vector<double> vals;
  for (int i = 0; i < 2; ++i) vals.push_back(g.eigenvalue(i).real());
  std::sort(vals.begin(), vals.end());
  CHECK(vals[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(vals[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("gevd residual invariant on a random symmetric-definite pair") {
  auto rng = make_rng(71);
  Matrix g1 = random_gaussian(6, 6, rng);
  Matrix g2 = random_gaussian(6, 6, rng);
  Matrix m1 = g1 * g1.transpose() + Matrix::Identity(6, 6);
  Matrix m2 = g2 * g2.transpose() + Matrix::Identity(6, 6);
  GevdResult g = gevd(m1, m2);
  const double scale = m1.norm() + m2.norm();
  for (Eigen::Index i = 0; i < 6; ++i) {
    Eigen::VectorXcd v = g.eigenvectors.col(i);
    Eigen::VectorXcd resid = g.betas(i) * (m1 * v) - g.alphas(i) * (m2 * v);
    CHECK(resid.norm() <= 1e-6 * scale * v.norm());
  }
}

TEST_CASE("gevd reports infinite eigenvalues of a singular m2 via beta near zero") {
  Matrix m2 = Matrix::Zero(2, 2);
  m2(0, 0) = 1.0;
  GevdResult g = gevd(Matrix::Identity(2, 2), m2);
  double min_abs_beta = std::min(std::abs(g.betas(0)), std::abs(g.betas(1)));
  double max_abs_beta = std::max(std::abs(g.betas(0)), std::abs(g.betas(1)));
  CHECK(min_abs_beta < 1e-12);
  CHECK(max_abs_beta > 1e-12);
}

TEST_CASE("gevd rejects non-square input") {
  CHECK_THROWS_AS(gevd(Matrix::Zero(2, 3), Matrix::Zero(2, 3)), DimensionError);
  CHECK_THROWS_AS(gevd(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), DimensionError);
}
