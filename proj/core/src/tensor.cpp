#include "btd/tensor.hpp"

#include <cmath>

namespace btd {

namespace {

void check_dims(int i, int j, int k) {
  if (i < 1 || j < 1 || k < 1) {
    throw DimensionError("tensor dims must be positive, got (" + std::to_string(i) + ", " +
                         std::to_string(j) + ", " + std::to_string(k) + ")");
  }
}

} // namespace

DenseTensor3::DenseTensor3(int i, int j, int k) : dims_{i, j, k} {
  check_dims(i, j, k);
  values_.assign(static_cast<std::size_t>(size()), 0.0);
}

DenseTensor3::DenseTensor3(int i, int j, int k, std::vector<double> values)
    : dims_{i, j, k}, values_(std::move(values)) {
  check_dims(i, j, k);
  if (static_cast<std::int64_t>(values_.size()) != size()) {
    throw DimensionError("tensor value count " + std::to_string(values_.size()) +
                         " does not match dims product " + std::to_string(size()));
  }
}

void DenseTensor3::check_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw ValidationError("tensor contains a non-finite entry");
    }
  }
}

} // namespace btd
