#include "btd/multilinear.hpp"

#include <string>

namespace btd {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw DimensionError("mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

} // namespace

Matrix unfold(const DenseTensor3& t, int mode) {
  check_mode(mode);
  const int I = t.dim(0), J = t.dim(1), K = t.dim(2);
  switch (mode) {
  case 1:
    // Storage is already i-fastest, so mode 1 is a straight reshape.
    return Eigen::Map<const Matrix>(t.values().data(), I, static_cast<Eigen::Index>(J) * K);
  case 2: {
    Matrix m(J, static_cast<Eigen::Index>(I) * K);
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < J; ++j)
        for (int i = 0; i < I; ++i)
          m(j, i + static_cast<Eigen::Index>(I) * k) = t(i, j, k);
    return m;
  }
  default: {
    Matrix m(K, static_cast<Eigen::Index>(I) * J);
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < J; ++j)
        for (int i = 0; i < I; ++i)
          m(k, i + static_cast<Eigen::Index>(I) * j) = t(i, j, k);
    return m;
  }
  }
}

DenseTensor3 fold(const Matrix& m, int mode, const std::array<int, 3>& dims) {
  check_mode(mode);
  const int I = dims[0], J = dims[1], K = dims[2];
  const Eigen::Index rows[3] = {I, J, K};
  const Eigen::Index cols[3] = {static_cast<Eigen::Index>(J) * K, static_cast<Eigen::Index>(I) * K,
                                static_cast<Eigen::Index>(I) * J};
  if (m.rows() != rows[mode - 1] || m.cols() != cols[mode - 1]) {
    throw DimensionError("fold: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(rows[mode - 1]) +
                         "x" + std::to_string(cols[mode - 1]) + " for mode " + std::to_string(mode));
  }
  DenseTensor3 t(I, J, K);
  switch (mode) {
  case 1:
    Eigen::Map<Matrix>(t.values().data(), I, static_cast<Eigen::Index>(J) * K) = m;
    break;
  case 2:
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < J; ++j)
        for (int i = 0; i < I; ++i)
          t(i, j, k) = m(j, i + static_cast<Eigen::Index>(I) * k);
    break;
  default:
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < J; ++j)
        for (int i = 0; i < I; ++i)
          t(i, j, k) = m(k, i + static_cast<Eigen::Index>(I) * j);
    break;
  }
  return t;
}

DenseTensor3 mode_n_product(const DenseTensor3& t, const Matrix& m, int mode) {
  check_mode(mode);
  if (m.cols() != t.dim(mode - 1)) {
    throw DimensionError("mode_n_product: matrix has " + std::to_string(m.cols()) +
                         " cols but tensor mode " + std::to_string(mode) + " has size " +
                         std::to_string(t.dim(mode - 1)));
  }
  std::array<int, 3> new_dims = t.dims();
  new_dims[static_cast<std::size_t>(mode - 1)] = static_cast<int>(m.rows());
  return fold(m * unfold(t, mode), mode, new_dims);
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("khatri_rao: column counts differ (" + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.cols()) + ")");
  }
  Matrix m(a.rows() * b.rows(), a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index p = 0; p < a.rows(); ++p)
      m.block(p * b.rows(), c, b.rows(), 1) = a(p, c) * b.col(c);
  return m;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      m.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return m;
}

double frobenius_norm_sq(const DenseTensor3& t) {
  return t.as_vector().squaredNorm();
}

} // namespace btd
