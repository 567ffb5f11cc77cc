#include <doctest.h>

#include <cmath>
#include <limits>

#include "btd/corcondia.hpp"
#include "btd/datagen.hpp"
#include "btd/rng.hpp"
#include "test_support.hpp"

using namespace btd;
using test_support::rel_diff;

TEST_CASE("generate is deterministic in the seed") {
  SimSpec spec;
  spec.dims = {6, 7, 8};
  spec.structure = BlockStructure({2, 1});
  spec.seed = 12345;
  spec.snr_db = 40.0;
  GeneratedTensor a = generate(spec);
  GeneratedTensor b = generate(spec);
  CHECK(a.tensor.values() == b.tensor.values()); // bit identical
  spec.seed = 12346;
  GeneratedTensor c = generate(spec);
  CHECK(a.tensor.values() != c.tensor.values());
}

TEST_CASE("structure [1] produces a rank-one tensor: all 2x2 slice minors vanish") {
  SimSpec spec;
  spec.dims = {5, 6, 4};
  spec.structure = BlockStructure({1});
  spec.seed = 99;
  GeneratedTensor gen = generate(spec);
  const DenseTensor3& t = gen.tensor;
  double scale = 0.0;
  for (double v : t.values()) scale = std::max(scale, std::abs(v));
  for (int k = 0; k < 4; ++k)
    for (int j1 = 0; j1 < 6; ++j1)
      for (int j2 = j1 + 1; j2 < 6; ++j2)
        for (int i1 = 0; i1 < 5; ++i1)
          for (int i2 = i1 + 1; i2 < 5; ++i2) {
            const double minor = t(i1, j1, k) * t(i2, j2, k) - t(i1, j2, k) * t(i2, j1, k);
            CHECK(std::abs(minor) < 1e-10 * scale * scale);
          }
}

TEST_CASE("noiseless generate then fit with the true structure diagnoses near 100") {
  SimSpec spec;
  spec.dims = {11, 12, 13};
  spec.structure = BlockStructure({1, 2});
  spec.seed = 7;
  GeneratedTensor gen = generate(spec);
  Ll1Model fit = fit_ll1(gen.tensor, spec.structure, FitOptions{.seed = 1});
  REQUIRE(fit.fit.converged);
  CHECK(btd_corcondia(gen.tensor, fit).percentage > 99.9);
}

TEST_CASE("add_noise hits the requested SNR exactly") {
  SimSpec spec;
  spec.dims = {6, 5, 7};
  spec.structure = BlockStructure({2});
  spec.seed = 21;
  GeneratedTensor gen = generate(spec);
  for (double snr : {50.0, 20.0, 3.0, -5.0}) {
    DenseTensor3 noisy = add_noise(gen.tensor, snr, 77);
    double noise_sq = 0.0;
    for (std::size_t i = 0; i < noisy.values().size(); ++i) {
      const double d = noisy.values()[i] - gen.tensor.values()[i];
      noise_sq += d * d;
    }
    const double measured = 10.0 * std::log10(frobenius_norm_sq(gen.tensor) / noise_sq);
    CHECK(std::abs(measured - snr) < 1e-9);
  }
  // at 50 dB the relative perturbation is 10^(-2.5)
  DenseTensor3 at50 = add_noise(gen.tensor, 50.0, 78);
  double diff_sq = 0.0;
  for (std::size_t i = 0; i < at50.values().size(); ++i) {
    const double d = at50.values()[i] - gen.tensor.values()[i];
    diff_sq += d * d;
  }
  const double ratio = std::sqrt(diff_sq / frobenius_norm_sq(gen.tensor));
  CHECK(ratio == doctest::Approx(std::pow(10.0, -2.5)).epsilon(1e-12));
}

TEST_CASE("add_noise rejects a zero tensor and non-finite SNR") {
  CHECK_THROWS_AS(add_noise(DenseTensor3(3, 3, 3), 50.0, 1), NumericalError);
  DenseTensor3 t(2, 2, 2, std::vector<double>(8, 1.0));
  CHECK_THROWS_AS(add_noise(t, std::numeric_limits<double>::infinity(), 1), ValidationError);
}

TEST_CASE("identity block transforms leave the model unchanged") {
  Ll1Model m = random_init(5, 6, 7, BlockStructure({2, 3}), 31);
  std::vector<Matrix> eye{Matrix::Identity(2, 2), Matrix::Identity(3, 3)};
  Ll1Model same = apply_block_transform(m, eye);
  for (std::size_t r = 0; r < m.blocks.size(); ++r) {
    CHECK(rel_diff(m.blocks[r].A, same.blocks[r].A) < 1e-14);
    CHECK(rel_diff(m.blocks[r].B, same.blocks[r].B) < 1e-14);
  }
}

TEST_CASE("block transforms preserve the reconstruction") {
  Ll1Model m = random_init(6, 7, 5, BlockStructure({2, 2}), 33);
  DenseTensor3 before = reconstruct(m);

  std::vector<Matrix> orthogonal{test_support::random_orthogonal(2, 1),
                                 test_support::random_orthogonal(2, 2)};
  CHECK(rel_diff(before, reconstruct(apply_block_transform(m, orthogonal))) < 1e-8);

  std::vector<Matrix> general = random_block_transforms(m.structure, 35, 1e4);
  CHECK(rel_diff(before, reconstruct(apply_block_transform(m, general))) < 1e-8);
}

TEST_CASE("block transforms leave the diagnostic unchanged") {
  SimSpec spec;
  spec.dims = {7, 8, 9};
  spec.structure = BlockStructure({1, 3});
  spec.seed = 37;
  GeneratedTensor gen = generate(spec);
  const double before = btd_corcondia(gen.tensor, gen.ground_truth).percentage;
  std::vector<Matrix> transforms = random_block_transforms(spec.structure, 39);
  Ll1Model moved = apply_block_transform(gen.ground_truth, transforms);
  const double after = btd_corcondia(gen.tensor, moved).percentage;
  CHECK(std::abs(before - after) < 1e-8);
}

TEST_CASE("block transforms validate shape and conditioning") {
  Ll1Model m = random_init(5, 5, 5, BlockStructure({2}), 41);
  CHECK_THROWS_AS(apply_block_transform(m, {}), DimensionError);
  CHECK_THROWS_AS(apply_block_transform(m, {Matrix::Identity(3, 3)}), DimensionError);
  Matrix singular = Matrix::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(apply_block_transform(m, {singular}), ValidationError);
  Matrix ill(2, 2);
  ill << 1.0, 0.0, 0.0, 1e-9; // condition number 1e9 > 1e6
  CHECK_THROWS_AS(apply_block_transform(m, {ill}), ValidationError);
}

TEST_CASE("snr_sweep validates its points") {
  SimSpec spec;
  spec.dims = {6, 6, 6};
  spec.structure = BlockStructure({2});
  spec.seed = 43;
  CHECK_THROWS_AS(snr_sweep(spec, {}), ValidationError);
  CHECK_THROWS_AS(snr_sweep(spec, {40.0, 40.0}), ValidationError);
  CHECK_THROWS_AS(snr_sweep(spec, {40.0, 50.0, 45.0}), ValidationError);
}

TEST_CASE("snr_sweep degrades gracefully with noise") {
  SimSpec spec;
  spec.dims = {20, 22, 24};
  spec.structure = BlockStructure({2, 2, 2});
  spec.seed = 45;
  const std::vector<double> points{90.0, 70.0, 50.0, 30.0, 10.0};
  SweepResult sweep = snr_sweep(spec, points);
  REQUIRE(sweep.rows.size() == points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(sweep.rows[i].snr_db == points[i]);
  }
  CHECK(sweep.rows[0].consistency_pct >= 99.0);
  // 20 dB apart: higher SNR may lose at most 2 percentage points to jitter
  for (std::size_t i = 0; i + 1 < sweep.rows.size(); ++i) {
    CHECK(sweep.rows[i].consistency_pct >= sweep.rows[i + 1].consistency_pct - 2.0);
  }
  CHECK(sweep.rows[0].relative_error < sweep.rows.back().relative_error);
}
