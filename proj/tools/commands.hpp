#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace granreg::tools {

/// Exit codes shared by all subcommands: 0 when the run completed and every
/// internal verification passed, 1 when a verification failed, 2 on error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitError = 2;

struct GenOptions {
  std::filesystem::path config_file;
  std::filesystem::path out_dir;
};
int cmd_gen(const GenOptions& options);

struct SweepGranularityOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  std::vector<int> levels;  // empty => 2..7
  double lambda = 0.0;
  double train_ratio = 0.8;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  double tolerance = 1e-8;
};
int cmd_sweep_granularity(const SweepGranularityOptions& options);

struct SweepLambdaOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  int level = 7;
  std::vector<double> lambdas;       // empty => a default grid
  bool lambda_per_n = false;         // interpret --lambda values as lambda / n_train
  std::vector<double> train_ratios;  // empty => {0.8}
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  double tolerance = 1e-8;
};
int cmd_sweep_lambda(const SweepLambdaOptions& options);

struct ConsistencyOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  int level = 7;
  std::vector<double> lambdas;  // one ensemble per value; empty => {0}
  std::size_t replicates = 10;
  double train_ratio = 0.8;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  double tolerance = 1e-8;
  bool include_intercept = false;
};
int cmd_consistency(const ConsistencyOptions& options);

struct SpectrumOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  int level = 7;
  std::size_t dense_cap = 4096;   // full-spectrum export limit
  std::size_t variance_check_cap = 512;  // dense-inverse verification limit
  bool log_binning = true;
  double x_min = 0.0;  // > 0 forces fixed_xmin; otherwise ks_scan
};
int cmd_spectrum(const SpectrumOptions& options);

struct SummarizeOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  std::string format = "csv";  // csv | json
};
int cmd_summarize(const SummarizeOptions& options);

}  // namespace granreg::tools
