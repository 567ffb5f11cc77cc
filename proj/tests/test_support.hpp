#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "btd/multilinear.hpp"
#include "btd/rng.hpp"
#include "btd/tensor.hpp"

namespace test_support {

inline btd::DenseTensor3 random_tensor(int i, int j, int k, std::uint64_t seed) {
  auto rng = btd::make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  btd::DenseTensor3 t(i, j, k);
  for (double& v : t.values()) v = normal(rng);
  return t;
}

/// t(i,j,k) = 1-based flat index: i + I*(j-1) + I*J*(k-1).
inline btd::DenseTensor3 index_tensor(int i, int j, int k) {
  btd::DenseTensor3 t(i, j, k);
  for (std::size_t f = 0; f < t.values().size(); ++f) t.values()[f] = static_cast<double>(f + 1);
  return t;
}

inline double rel_diff(const btd::Matrix& a, const btd::Matrix& b) {
  const double scale = std::max(1e-300, std::max(a.norm(), b.norm()));
  return (a - b).norm() / scale;
}

inline double rel_diff(const btd::DenseTensor3& a, const btd::DenseTensor3& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    num += d * d;
    den += a.values()[i] * a.values()[i];
  }
  return std::sqrt(num) / std::max(1e-300, std::sqrt(den));
}

inline btd::Matrix random_orthogonal(int n, std::uint64_t seed) {
  auto rng = btd::make_rng(seed);
  btd::Matrix g = btd::random_gaussian(n, n, rng);
  return Eigen::HouseholderQR<btd::Matrix>(g).householderQ();
}

} // namespace test_support
