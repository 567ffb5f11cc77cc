#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "btd/block_structure.hpp"
#include "btd/ll1.hpp"
#include "btd/tensor.hpp"

namespace btd {

/// Candidate grid: every nondecreasing multiset (L_1 <= ... <= L_R) with
/// 1 <= R <= max_R and 1 <= Lr <= max_L. Block order is an indeterminacy of
/// the model, so permutations are never enumerated separately.
struct SearchSpace {
  int max_R = 6;
  int max_L = 6;
  /// Keep the all-ones (pure polyadic) structures in the grid so the search
  /// scores plain CPD compatibility alongside the block candidates.
  bool include_cpd = true;
};

struct ReportRow {
  BlockStructure structure;
  std::optional<double> mean_pct;           // absent when every repeat failed
  double sd_pct = 0.0;                      // sample SD over converged repeats
  std::optional<double> mean_relative_error;
  int repeats = 0;                          // repeats attempted
  int failures = 0;                         // non-converged fits, excluded from stats
};

struct SkippedCandidate {
  BlockStructure structure;
  std::string reason;
};

/// Rows sorted by mean consistency descending; rows with no surviving repeats
/// rank last. Ties break toward smaller mean relative error (separating
/// genuinely matching structures from degenerate fits whose consistency
/// saturates at 100), then smaller sum(Lr), then smaller R.
struct ConsistencyReport {
  std::vector<ReportRow> rows;
  std::vector<SkippedCandidate> skipped;
};

/// All candidates, ordered by R ascending then lexicographically.
std::vector<BlockStructure> enumerate_structures(const SearchSpace& space);

/// Fits every candidate `repeats` times (seeds derived from seed, candidate
/// index, repeat index), scores each converged fit by its core consistency,
/// and ranks candidates by mean consistency. Candidates with sum(Lr) > I*J
/// are skipped and recorded, as is the degenerate [1] candidate whose
/// consistency is identically 100 on any tensor. Cells may run on `threads`
/// workers; results are aggregated by index, so the report does not depend
/// on the thread count.
ConsistencyReport grid_search(const DenseTensor3& t, const SearchSpace& space, int repeats,
                              std::uint64_t seed, const FitOptions& fit_opts = {},
                              int threads = 1);

} // namespace btd
