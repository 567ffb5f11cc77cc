#pragma once

#include "btd/ll1.hpp"
#include "btd/tensor.hpp"

namespace btd {

/// The least-squares Tucker core relating a tensor to expanded factors.
/// dims are (sum(Lr), sum(Lr), R).
struct CoreTensor {
  DenseTensor3 values;
  BlockStructure structure;
  /// True when an expanded factor was rank deficient and the core had to be
  /// computed as a minimum-norm solution.
  bool rank_deficient = false;
};

struct ConsistencyResult {
  /// (1 - ||ideal - core||^2 / ||ideal||^2) * 100, capped at 100.
  /// Can be arbitrarily negative; never NaN.
  double percentage = 0.0;
  CoreTensor core;
  BlockStructure structure;
};

/// The target core for a rank-(Lr, Lr, 1) model: slice r carries an Lr x Lr
/// identity block at row/column offset sum of L_s for s < r, zeros elsewhere.
/// For an all-ones structure this is the superidentity of the polyadic model.
CoreTensor ideal_core(const BlockStructure& structure);

/// Least-squares core minimizing ||t - core x1 A x2 B x3 C||_F for the
/// model's expanded factors, computed mode-wise with pseudoinverses. With a
/// rank-deficient expanded factor the minimum-norm core is computed through
/// the explicit Kronecker normal equations and flagged.
CoreTensor compute_core(const DenseTensor3& t, const Ll1Model& model);

/// Consistency percentage of a computed core against the ideal core of its
/// structure.
ConsistencyResult consistency(const CoreTensor& core);

/// consistency(compute_core(t, model)): 100 means the tensor interacts
/// exactly in rank-(Lr, Lr, 1) blocks; with all Lr = 1 this is the classic
/// polyadic core consistency diagnostic.
ConsistencyResult btd_corcondia(const DenseTensor3& t, const Ll1Model& model);

} // namespace btd
