#include <benchmark/benchmark.h>

#include "granreg/consistency.hpp"
#include "granreg/regression.hpp"
#include "granreg/rng.hpp"
#include "granreg/spectra.hpp"
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
  cfg.seed = 11;
  return generate(cfg);
}

}  // namespace

static void BM_FitOls(benchmark::State& state) {
  const auto data = make_corpus(20000, static_cast<std::size_t>(state.range(0)));
  const auto x = SparseDesignMatrix::build(data.corpus, build_vocabulary(data.corpus, 7));
  const auto y = data.corpus.log_costs();
  FitConfig cfg;
  cfg.tolerance = 1e-8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(x, y, cfg));
  }
}
BENCHMARK(BM_FitOls)->Arg(250)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_FitRidge(benchmark::State& state) {
  const auto data = make_corpus(20000, 2000);
  const auto x = SparseDesignMatrix::build(data.corpus, build_vocabulary(data.corpus, 7));
  const auto y = data.corpus.log_costs();
  FitConfig cfg;
  cfg.tolerance = 1e-8;
  cfg.lambda = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(x, y, cfg));
  }
}
BENCHMARK(BM_FitRidge)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_Spearman(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> a(static_cast<std::size_t>(state.range(0)));
  std::vector<double> b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.normal();
    b[i] = a[i] + rng.normal();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(spearman(a, b));
  }
}
BENCHMARK(BM_Spearman)->Arg(2000)->Arg(20000);

static void BM_PowerLawScan(benchmark::State& state) {
  Rng rng(5);
  const auto samples =
      sample_discrete_power_law(rng, 1.9, 1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_power_law(samples, PowerLawMethod::ks_scan));
  }
}
BENCHMARK(BM_PowerLawScan)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
