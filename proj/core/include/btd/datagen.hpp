#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "btd/ll1.hpp"
#include "btd/tensor.hpp"

namespace btd {

enum class FactorDistribution { standard_normal };

/// Recipe for one synthetic tensor with known ground truth.
struct SimSpec {
  std::array<int, 3> dims{0, 0, 0};
  BlockStructure structure;
  std::uint64_t seed = 0;
  std::optional<double> snr_db; // omit for a noiseless tensor
  FactorDistribution factor_distribution = FactorDistribution::standard_normal;
};

struct GeneratedTensor {
  DenseTensor3 tensor; // reconstruction of the ground truth, plus noise if asked
  Ll1Model ground_truth;
};

struct SweepRow {
  double snr_db = 0.0;
  double consistency_pct = 0.0;
  double relative_error = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Deterministic function of the spec: same seed, same tensor, bit for bit.
GeneratedTensor generate(const SimSpec& spec);

/// t plus i.i.d. Gaussian noise rescaled after the draw so that
/// 10*log10(||t||^2 / ||noise||^2) equals snr_db exactly.
/// Throws NumericalError for a zero tensor (the ratio is undefined).
DenseTensor3 add_noise(const DenseTensor3& t, double snr_db, std::uint64_t seed);

enum class InverseMode { Br_gets_inverse_transpose };

/// Applies the block indeterminacy A_r -> A_r * F_r, B_r -> B_r * F_r^{-T};
/// the reconstruction is unchanged. Each F_r must be L_r x L_r, nonsingular,
/// with condition number at most 1e6.
Ll1Model apply_block_transform(const Ll1Model& model, const std::vector<Matrix>& transforms,
                               InverseMode inverse_mode = InverseMode::Br_gets_inverse_transpose);

/// Random Gaussian L_r x L_r transforms redrawn until their condition number
/// is below max_cond; suitable inputs for apply_block_transform.
std::vector<Matrix> random_block_transforms(const BlockStructure& structure, std::uint64_t seed,
                                            double max_cond = 1e3);

/// The noise-on-factors protocol: for each SNR point the ground-truth factors
/// (not the tensor) are perturbed and the consistency of the perturbed model
/// is evaluated against the clean tensor. snr_points must be strictly
/// monotone.
SweepResult snr_sweep(const SimSpec& spec, const std::vector<double>& snr_points);

} // namespace btd
