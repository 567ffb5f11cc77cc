#include "btd/block_structure.hpp"

#include <algorithm>
#include <numeric>

namespace btd {

BlockStructure::BlockStructure(std::vector<int> block_ranks) : ranks_(std::move(block_ranks)) {
  if (ranks_.empty()) {
    throw ValidationError("block structure must contain at least one block");
  }
  for (int l : ranks_) {
    if (l < 1) {
      throw ValidationError("block ranks must be positive, got " + std::to_string(l));
    }
  }
}

int BlockStructure::total() const {
  return std::accumulate(ranks_.begin(), ranks_.end(), 0);
}

int BlockStructure::offset(int r) const {
  return std::accumulate(ranks_.begin(), ranks_.begin() + r, 0);
}

bool BlockStructure::is_canonical() const {
  return std::is_sorted(ranks_.begin(), ranks_.end());
}

BlockStructure BlockStructure::canonical() const {
  std::vector<int> sorted = ranks_;
  std::sort(sorted.begin(), sorted.end());
  return BlockStructure(std::move(sorted));
}

std::string BlockStructure::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < ranks_.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(ranks_[i]);
  }
  s += "]";
  return s;
}

} // namespace btd
