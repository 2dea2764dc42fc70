#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "granreg/consistency.hpp"
#include "granreg/corpus_io.hpp"
#include "granreg/errors.hpp"
#include "granreg/regression.hpp"
#include "granreg/spectra.hpp"
#include "granreg/synthetic.hpp"

using namespace granreg;

TEST_CASE("generator config validation") {
  GeneratorConfig cfg;
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg = GeneratorConfig{};
  cfg.d_mean = 30.0;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg = GeneratorConfig{};
  cfg.n_stays = 0;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
}

TEST_CASE("generation is byte-identical for identical configs") {
  GeneratorConfig cfg;
  cfg.n_stays = 500;
  cfg.n_codes = 80;
  cfg.seed = 99;
  const auto a = generate(cfg);
  const auto b = generate(cfg);

  std::ostringstream sa, sb;
  write_corpus(a.corpus, sa, CorpusFormat::jsonl);
  write_corpus(b.corpus, sb, CorpusFormat::jsonl);
  CHECK(sa.str() == sb.str());
  CHECK(a.truth.beta == b.truth.beta);
  CHECK(a.truth.codes == b.truth.codes);

  cfg.seed = 100;
  const auto c = generate(cfg);
  std::ostringstream sc;
  write_corpus(c.corpus, sc, CorpusFormat::jsonl);
  CHECK(sa.str() != sc.str());
}

TEST_CASE("code universe spans lengths 3 to 7 with valid codes") {
  GeneratorConfig cfg;
  cfg.n_stays = 100;
  cfg.n_codes = 200;
  cfg.seed = 5;
  const auto data = generate(cfg);
  std::vector<std::size_t> by_length(8, 0);
  for (const auto& code : data.truth.codes) {
    CHECK_NOTHROW(IcdCode::normalize(code));
    by_length[code.size()] += 1;
  }
  for (int len = 3; len <= 7; ++len) CHECK(by_length[static_cast<std::size_t>(len)] > 0);
  CHECK(std::is_sorted(data.truth.codes.begin(), data.truth.codes.end()));
}

TEST_CASE("code cap holds and counts look like the configured mean") {
  GeneratorConfig cfg;
  cfg.n_stays = 20000;
  cfg.n_codes = 300;
  cfg.d_mean = 8.0;
  cfg.seed = 12;
  const auto data = generate(cfg);
  int max_d = 0;
  double mean_d = 0.0;
  for (const auto& rec : data.corpus) {
    max_d = std::max(max_d, static_cast<int>(rec.codes.size()));
    mean_d += static_cast<double>(rec.codes.size());
  }
  mean_d /= static_cast<double>(data.corpus.size());
  CHECK(max_d <= 25);
  CHECK(mean_d >= 7.6);
  CHECK(mean_d <= 8.4);
}

TEST_CASE("noiseless corpora recover the ground truth") {
  GeneratorConfig cfg;
  cfg.n_stays = 6000;
  cfg.n_codes = 50;  // small universe: every code appears many times
  cfg.noise_sigma = 0.0;
  cfg.seed = 21;
  const auto data = generate(cfg);

  const auto vocab = build_vocabulary(data.corpus, 7);
  REQUIRE(vocab.size() == cfg.n_codes);  // all codes drawn at least twice
  const auto x = SparseDesignMatrix::build(data.corpus, vocab);
  FitConfig fit_cfg;
  fit_cfg.tolerance = 1e-12;
  const auto f = fit(x, data.corpus.log_costs(), fit_cfg);

  for (std::size_t j = 0; j < vocab.size(); ++j) {
    const auto it = std::lower_bound(data.truth.codes.begin(), data.truth.codes.end(),
                                     vocab.code(j));
    REQUIRE(it != data.truth.codes.end());
    const auto t = static_cast<std::size_t>(it - data.truth.codes.begin());
    CHECK(f.coefficients[j] ==
          doctest::Approx(data.truth.beta[t]).epsilon(1e-6).scale(1.0));
  }
  CHECK(f.intercept == doctest::Approx(data.truth.beta0).epsilon(1e-6));
}

TEST_CASE("hessian-diagonal power law matches the configured exponent") {
  GeneratorConfig cfg;
  cfg.n_stays = 100000;
  cfg.n_codes = 2000;
  cfg.alpha = 1.9;
  cfg.d_mean = 8.0;
  cfg.seed = 42;
  const auto data = generate(cfg);
  const auto vocab = build_vocabulary(data.corpus, 7);
  const auto x = SparseDesignMatrix::build(data.corpus, vocab);
  const auto h = hessian_summary(x, 0);
  const auto fit = fit_power_law(h.diagonal(), PowerLawMethod::ks_scan);
  CHECK(fit.alpha_hat >= 1.8);
  CHECK(fit.alpha_hat <= 2.0);
}

TEST_CASE("calibrated noise hits the target R^2") {
  GeneratorConfig cfg;
  cfg.n_stays = 50000;
  cfg.n_codes = 400;
  cfg.seed = 33;
  const double sigma = calibrate_noise(cfg, 0.4);
  cfg.noise_sigma = sigma;
  const auto data = generate(cfg);

  const Split s = split(data.corpus, 0.8, 7);
  const auto vocab = build_vocabulary(data.corpus, 7);
  const auto x = SparseDesignMatrix::build(data.corpus, vocab);
  const auto y = data.corpus.log_costs();
  const auto x_train = x.select_rows(s.train);
  const auto x_test = x.select_rows(s.test);
  std::vector<double> y_train, y_test;
  for (const auto i : s.train) y_train.push_back(y[i]);
  for (const auto i : s.test) y_test.push_back(y[i]);
  FitConfig fc;
  fc.tolerance = 1e-8;
  const auto f = fit(x_train, y_train, fc);
  const double test_r2 = r2_score(y_test, predict(f, x_test));
  CHECK(test_r2 >= 0.35);
  CHECK(test_r2 <= 0.45);
}

TEST_CASE("calibrate_noise is monotone and validates the target") {
  GeneratorConfig cfg;
  cfg.n_stays = 5000;
  cfg.n_codes = 100;
  cfg.seed = 3;
  CHECK_THROWS_AS(calibrate_noise(cfg, 0.0), ConfigError);
  CHECK_THROWS_AS(calibrate_noise(cfg, 1.0), ConfigError);
  const double s30 = calibrate_noise(cfg, 0.3);
  const double s50 = calibrate_noise(cfg, 0.5);
  const double s80 = calibrate_noise(cfg, 0.8);
  CHECK(s30 > s50);
  CHECK(s50 > s80);
}

TEST_CASE("ground truth sidecar round-trips through json") {
  GeneratorConfig cfg;
  cfg.n_stays = 50;
  cfg.n_codes = 20;
  cfg.seed = 2;
  const auto data = generate(cfg);
  const auto path = std::filesystem::temp_directory_path() / "granreg_truth_test.json";
  write_ground_truth_json(data.truth, cfg, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str().find("true_beta0") != std::string::npos);
  CHECK(buf.str().find("noise_sigma") != std::string::npos);
  std::filesystem::remove(path);
}
