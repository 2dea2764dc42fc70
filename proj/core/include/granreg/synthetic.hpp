#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "granreg/stay.hpp"

namespace granreg {

/// Configuration for the synthetic corpus generator. Defaults are
/// calibrated so granularity sweeps and spectra behave like real
/// claims data: power-law code popularity, capped codes per stay, and a
/// known linear process behind the log cost.
struct GeneratorConfig {
  std::size_t n_stays = 10000;
  std::size_t n_codes = 500;     // target vocabulary size at level 7
  double alpha = 1.93;           // code-popularity power-law exponent
  double d_mean = 8.0;           // mean diagnoses per stay
  int d_max = 25;
  double beta_scale = 0.2;       // std of true per-code coefficients
  double beta0 = 3.5;            // true intercept (log10 dollars)
  double noise_sigma = 0.3;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

struct GroundTruth {
  double beta0 = 0.0;
  std::vector<std::string> codes;  // sorted; aligned with beta
  std::vector<double> beta;
  double noise_sigma = 0.0;
};

struct SyntheticData {
  StayCorpus corpus;
  GroundTruth truth;
};

/// Draws a corpus: per-code popularity from a discrete power law with
/// exponent alpha; per stay, D_i from a right-truncated geometric with the
/// configured mean, then D_i distinct codes sampled proportional to
/// popularity; log_cost = beta0 + sum beta_j + Normal(0, noise_sigma).
/// Byte-identical output for identical configs.
SyntheticData generate(const GeneratorConfig& config);

/// Noise level sigma such that the population R^2 (signal variance over
/// total variance) hits target_r2, with the signal variance estimated from
/// a noiseless pilot sample. Throws ConfigError unless 0 < target_r2 < 1.
double calibrate_noise(const GeneratorConfig& config, double target_r2);

/// Ground-truth sidecar: true_beta0, per-code betas, noise_sigma, config echo.
void write_ground_truth_json(const GroundTruth& truth, const GeneratorConfig& config,
                             const std::filesystem::path& path);

}  // namespace granreg
