#pragma once

#include <cstdint>
#include <random>

#include "btd/tensor.hpp"

namespace btd {

/// Mixes a base seed with up to two stream indices (splitmix64 steps) so that
/// restarts, grid cells and noise draws get independent deterministic streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

std::mt19937_64 make_rng(std::uint64_t seed);

/// Matrix with i.i.d. standard normal entries, column-major fill order.
Matrix random_gaussian(int rows, int cols, std::mt19937_64& rng);

/// Unit-norm vector with random direction.
Vector random_unit_vector(int size, std::mt19937_64& rng);

} // namespace btd
