#pragma once

#include <stdexcept>
#include <string>

namespace btd {

/// Shape or index disagreement between operands.
class DimensionError : public std::invalid_argument {
public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed user input: bad flags, bad file contents, violated preconditions.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that cannot produce a meaningful result (singular pencil,
/// SNR of a zero tensor, ...).
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace btd
