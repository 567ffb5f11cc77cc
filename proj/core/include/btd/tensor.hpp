#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "btd/errors.hpp"

namespace btd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real three-way array. Entries are stored first-index-fastest:
/// element (i, j, k) lives at flat position i + I*(j + J*k). Indices are
/// 0-based everywhere in code; file formats use 1-based coordinates.
class DenseTensor3 {
public:
  DenseTensor3() = default;

  /// Zero tensor of the given shape.
  DenseTensor3(int i, int j, int k);

  /// Takes ownership of `values`, which must hold i*j*k finite entries in
  /// first-index-fastest order.
  DenseTensor3(int i, int j, int k, std::vector<double> values);

  int dim(int mode) const { return dims_[static_cast<std::size_t>(mode)]; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::int64_t size() const {
    return static_cast<std::int64_t>(dims_[0]) * dims_[1] * dims_[2];
  }

  double operator()(int i, int j, int k) const {
    return values_[static_cast<std::size_t>(i) +
                   static_cast<std::size_t>(dims_[0]) *
                       (static_cast<std::size_t>(j) +
                        static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(k))];
  }
  double& operator()(int i, int j, int k) {
    return values_[static_cast<std::size_t>(i) +
                   static_cast<std::size_t>(dims_[0]) *
                       (static_cast<std::size_t>(j) +
                        static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(k))];
  }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// The flat values viewed as an Eigen column vector (no copy).
  Eigen::Map<const Vector> as_vector() const {
    return Eigen::Map<const Vector>(values_.data(), static_cast<Eigen::Index>(values_.size()));
  }

  bool same_dims(const DenseTensor3& other) const { return dims_ == other.dims_; }

  /// Throws ValidationError if any entry is NaN or infinite.
  void check_finite() const;

private:
  std::array<int, 3> dims_{0, 0, 0};
  std::vector<double> values_;
};

} // namespace btd
