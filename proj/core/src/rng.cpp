#include "btd/rng.hpp"

namespace btd {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  state ^= a + 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(state);
  state ^= b + 0xd1b54a32d192ed03ULL;
  h ^= splitmix64(state);
  return h;
}

std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

Matrix random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      m(r, c) = normal(rng);
  return m;
}

Vector random_unit_vector(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(size);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  double n = v.norm();
  while (n < 1e-12) { // astronomically unlikely, but keep the contract total
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    n = v.norm();
  }
  return v / n;
}

} // namespace btd
