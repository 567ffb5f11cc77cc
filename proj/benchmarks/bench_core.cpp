#include <benchmark/benchmark.h>

#include "btd/corcondia.hpp"
#include "btd/datagen.hpp"
#include "btd/ll1.hpp"
#include "btd/multilinear.hpp"
#include "btd/rng.hpp"

namespace {

btd::GeneratedTensor paper_scale_tensor() {
  btd::SimSpec spec;
  spec.dims = {50, 60, 70};
  spec.structure = btd::BlockStructure({2, 2, 2, 2});
  spec.seed = 42;
  return btd::generate(spec);
}

void BM_Unfold(benchmark::State& state) {
  btd::GeneratedTensor gen = paper_scale_tensor();
  const int mode = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(btd::unfold(gen.tensor, mode));
  }
}
BENCHMARK(BM_Unfold)->Arg(1)->Arg(2)->Arg(3);

void BM_KhatriRao(benchmark::State& state) {
  auto rng = btd::make_rng(1);
  btd::Matrix a = btd::random_gaussian(70, 16, rng);
  btd::Matrix b = btd::random_gaussian(60, 16, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(btd::khatri_rao(a, b));
  }
}
BENCHMARK(BM_KhatriRao);

void BM_AlsSweep(benchmark::State& state) {
  btd::GeneratedTensor gen = paper_scale_tensor();
  btd::Ll1Model model = btd::random_init(50, 60, 70, gen.ground_truth.structure, 7);
  for (auto _ : state) {
    model = btd::als_sweep(gen.tensor, model);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_AlsSweep);

void BM_FitLl1(benchmark::State& state) {
  btd::GeneratedTensor gen = paper_scale_tensor();
  btd::FitContext ctx = btd::make_fit_context(gen.tensor);
  btd::FitOptions opts;
  opts.restarts = 1;
  opts.max_iter = 100;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    opts.seed = seed++;
    benchmark::DoNotOptimize(btd::fit_ll1(ctx, gen.ground_truth.structure, opts));
  }
}
BENCHMARK(BM_FitLl1);

void BM_GevdInit(benchmark::State& state) {
  btd::GeneratedTensor gen = paper_scale_tensor();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(btd::gevd_init(gen.tensor, gen.ground_truth.structure, seed++));
  }
}
BENCHMARK(BM_GevdInit);

void BM_BtdCorcondia(benchmark::State& state) {
  btd::GeneratedTensor gen = paper_scale_tensor();
  for (auto _ : state) {
    benchmark::DoNotOptimize(btd::btd_corcondia(gen.tensor, gen.ground_truth));
  }
}
BENCHMARK(BM_BtdCorcondia);

void BM_IdealCore(benchmark::State& state) {
  btd::BlockStructure s({2, 2, 3, 3});
  for (auto _ : state) {
    benchmark::DoNotOptimize(btd::ideal_core(s));
  }
}
BENCHMARK(BM_IdealCore);

} // namespace

BENCHMARK_MAIN();
