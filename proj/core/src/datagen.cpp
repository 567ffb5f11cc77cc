#include "btd/datagen.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "btd/corcondia.hpp"
#include "btd/linalg.hpp"
#include "btd/multilinear.hpp"
#include "btd/rng.hpp"

namespace btd {

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f6973;
constexpr std::uint64_t kSweepStream = 0x73776565;
constexpr std::uint64_t kTransformStream = 0x7472616e;

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

/// m plus Gaussian noise rescaled to the exact power ratio 10^(-snr_db/10).
Matrix perturb_to_snr(const Matrix& m, double snr_db, std::mt19937_64& rng) {
  Matrix noise = random_gaussian(static_cast<int>(m.rows()), static_cast<int>(m.cols()), rng);
  const double nn = noise.norm();
  if (nn == 0.0) return m;
  const double scale = m.norm() / nn * std::pow(10.0, -snr_db / 20.0);
  return m + scale * noise;
}

} // namespace

GeneratedTensor generate(const SimSpec& spec) {
  if (spec.dims[0] < 1 || spec.dims[1] < 1 || spec.dims[2] < 1) {
    throw ValidationError("generate: dims must be positive");
  }
  if (spec.snr_db && !std::isfinite(*spec.snr_db)) {
    throw ValidationError("generate: snr_db must be finite; omit it for a noiseless tensor");
  }
  GeneratedTensor out{DenseTensor3(), Ll1Model{}};
  out.ground_truth =
      random_init(spec.dims[0], spec.dims[1], spec.dims[2], spec.structure, spec.seed);
  out.tensor = reconstruct(out.ground_truth);
  if (spec.snr_db) {
    out.tensor = add_noise(out.tensor, *spec.snr_db, derive_seed(spec.seed, kNoiseStream));
  }
  return out;
}

DenseTensor3 add_noise(const DenseTensor3& t, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) {
    throw ValidationError("add_noise: snr_db must be finite; omit the noise step instead");
  }
  const double signal_sq = frobenius_norm_sq(t);
  if (signal_sq == 0.0) {
    throw NumericalError("add_noise: SNR is undefined for a zero tensor");
  }
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(t.values().size());
  double noise_sq = 0.0;
  for (double& v : noise) {
    v = normal(rng);
    noise_sq += v * v;
  }
  // rescale post-draw so the requested ratio holds exactly
  const double scale = std::sqrt(signal_sq / noise_sq) * std::pow(10.0, -snr_db / 20.0);
  DenseTensor3 out = t;
  for (std::size_t i = 0; i < noise.size(); ++i) out.values()[i] += scale * noise[i];
  return out;
}

Ll1Model apply_block_transform(const Ll1Model& model, const std::vector<Matrix>& transforms,
                               InverseMode /*inverse_mode*/) {
  model.validate();
  const BlockStructure& s = model.structure;
  if (static_cast<int>(transforms.size()) != s.num_blocks()) {
    throw DimensionError("apply_block_transform: expected " + std::to_string(s.num_blocks()) +
                         " transforms, got " + std::to_string(transforms.size()));
  }
  Ll1Model out = model;
  for (int r = 0; r < s.num_blocks(); ++r) {
    const Matrix& f = transforms[static_cast<std::size_t>(r)];
    const int lr = s.rank(r);
    if (f.rows() != lr || f.cols() != lr) {
      throw DimensionError("apply_block_transform: transform " + std::to_string(r + 1) +
                           " must be " + std::to_string(lr) + "x" + std::to_string(lr));
    }
    if (!f.allFinite()) {
      throw ValidationError("apply_block_transform: transform contains non-finite entries");
    }
    const double cond = condition_number(f);
    if (!(cond <= 1e6)) {
      throw ValidationError("apply_block_transform: transform " + std::to_string(r + 1) +
                            " is singular or ill-conditioned (cond > 1e6)");
    }
    Ll1Block& blk = out.blocks[static_cast<std::size_t>(r)];
    blk.A = blk.A * f;
    blk.B = blk.B * f.inverse().transpose();
  }
  return out;
}

std::vector<Matrix> random_block_transforms(const BlockStructure& structure, std::uint64_t seed,
                                            double max_cond) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(structure.num_blocks()));
  for (int r = 0; r < structure.num_blocks(); ++r) {
    auto rng = make_rng(derive_seed(seed, kTransformStream, static_cast<std::uint64_t>(r)));
    const int lr = structure.rank(r);
    Matrix f = random_gaussian(lr, lr, rng);
    while (!(condition_number(f) <= max_cond)) {
      f = random_gaussian(lr, lr, rng);
    }
    out.push_back(std::move(f));
  }
  return out;
}

SweepResult snr_sweep(const SimSpec& spec, const std::vector<double>& snr_points) {
  if (snr_points.empty()) {
    throw ValidationError("snr_sweep: need at least one SNR point");
  }
  for (std::size_t i = 1; i < snr_points.size(); ++i) {
    const bool incr = snr_points[1] > snr_points[0];
    if ((incr && snr_points[i] <= snr_points[i - 1]) ||
        (!incr && snr_points[i] >= snr_points[i - 1])) {
      throw ValidationError("snr_sweep: SNR points must be strictly ordered");
    }
  }

  SimSpec clean = spec;
  clean.snr_db.reset();
  GeneratedTensor gen = generate(clean);
  const double norm_t = std::sqrt(frobenius_norm_sq(gen.tensor));

  SweepResult result;
  result.rows.reserve(snr_points.size());
  for (std::size_t p = 0; p < snr_points.size(); ++p) {
    const double snr = snr_points[p];
    Ll1Model noisy = gen.ground_truth;
    for (std::size_t r = 0; r < noisy.blocks.size(); ++r) {
      auto rng = make_rng(derive_seed(spec.seed, kSweepStream,
                                      (static_cast<std::uint64_t>(p) << 20) ^ r));
      Ll1Block& blk = noisy.blocks[r];
      blk.A = perturb_to_snr(blk.A, snr, rng);
      blk.B = perturb_to_snr(blk.B, snr, rng);
      Matrix c = blk.c;
      blk.c = perturb_to_snr(c, snr, rng).col(0);
    }
    SweepRow row;
    row.snr_db = snr;
    row.consistency_pct = btd_corcondia(gen.tensor, noisy).percentage;
    DenseTensor3 rec = reconstruct(noisy);
    double diff_sq = 0.0;
    for (std::size_t i = 0; i < rec.values().size(); ++i) {
      const double d = rec.values()[i] - gen.tensor.values()[i];
      diff_sq += d * d;
    }
    row.relative_error = norm_t > 0.0 ? std::sqrt(diff_sq) / norm_t : 0.0;
    result.rows.push_back(row);
  }
  return result;
}

} // namespace btd
