#pragma once

#include <string>
#include <vector>

#include "btd/errors.hpp"

namespace btd {

/// The block ranks (L_1, ..., L_R) of a rank-(Lr, Lr, 1) model. Block order
/// carries no meaning for the model itself; the canonical form used by the
/// rank search is nondecreasing.
class BlockStructure {
public:
  BlockStructure() = default;
  explicit BlockStructure(std::vector<int> block_ranks);

  int num_blocks() const { return static_cast<int>(ranks_.size()); }

  /// Sum of the block ranks.
  int total() const;

  int rank(int r) const { return ranks_[static_cast<std::size_t>(r)]; }
  const std::vector<int>& ranks() const { return ranks_; }

  /// Column offset of block r inside the expanded factors: sum of L_s for s < r.
  int offset(int r) const;

  bool is_canonical() const;
  BlockStructure canonical() const;

  /// "[2,2,3]"
  std::string to_string() const;

  bool operator==(const BlockStructure& other) const { return ranks_ == other.ranks_; }

private:
  std::vector<int> ranks_;
};

} // namespace btd
