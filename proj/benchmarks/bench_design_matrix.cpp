#include <benchmark/benchmark.h>

#include "granreg/design_matrix.hpp"
#include "granreg/synthetic.hpp"
#include "granreg/vocabulary.hpp"

using namespace granreg;

namespace {

SyntheticData make_corpus(std::size_t n_stays, std::size_t n_codes) {
  GeneratorConfig cfg;
  cfg.n_stays = n_stays;
  cfg.n_codes = n_codes;
  cfg.alpha = 1.9;
  cfg.d_mean = 8.0;
  cfg.noise_sigma = 0.3;
  cfg.seed = 7;
  return generate(cfg);
}

}  // namespace

static void BM_BuildDesignMatrix(benchmark::State& state) {
  const auto data = make_corpus(static_cast<std::size_t>(state.range(0)), 1000);
  const auto vocab = build_vocabulary(data.corpus, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SparseDesignMatrix::build(data.corpus, vocab));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildDesignMatrix)->Arg(1000)->Arg(10000)->Arg(50000)
    ->Unit(benchmark::kMillisecond);

static void BM_MergeColumns(benchmark::State& state) {
  const auto data = make_corpus(20000, 2000);
  const auto vocab = build_vocabulary(data.corpus, 7);
  const auto x = SparseDesignMatrix::build(data.corpus, vocab);
  const auto map = build_merge_map(vocab, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(merge_columns(x, map));
  }
}
BENCHMARK(BM_MergeColumns)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_HessianDiagonal(benchmark::State& state) {
  const auto data = make_corpus(static_cast<std::size_t>(state.range(0)), 2000);
  const auto vocab = build_vocabulary(data.corpus, 7);
  const auto x = SparseDesignMatrix::build(data.corpus, vocab);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hessian_summary(x, 0));  // diagonal + trace only
  }
}
BENCHMARK(BM_HessianDiagonal)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
