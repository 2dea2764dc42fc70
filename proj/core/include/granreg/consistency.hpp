#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "granreg/regression.hpp"
#include "granreg/stay.hpp"

namespace granreg {

/// Spearman rank correlation with fractional (average) tie ranks. Throws
/// DegenerateVector on constant input, ShapeMismatch on length mismatch.
double spearman(std::span<const double> a, std::span<const double> b);

/// Consistency metric: (1 / (N(N-1))) * sum over ordered pairs a != b of
/// r_s(beta^(a), beta^(b)); equals the mean over unordered pairs.
double eta(std::span<const std::vector<double>> coefficient_rows);

struct EnsembleSpec {
  std::size_t replicates = 10;  // N >= 2
  double train_ratio = 0.8;
  std::uint64_t base_seed = 0;  // replicate i splits with base_seed + i
  FitConfig fit;
  int level = kMaxLevel;
  bool include_intercept = false;  // prepend beta0 to each compared vector
};

struct ReplicateScore {
  double train_r2 = 0.0;
  double test_r2 = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct PairCorrelation {
  std::size_t a = 0;
  std::size_t b = 0;
  double r_s = 0.0;
};

struct ConsistencyReport {
  std::vector<std::vector<double>> coefficients;  // N x p, vocabulary-aligned
  std::vector<PairCorrelation> pairwise;          // N(N-1)/2 unordered pairs
  double eta = 0.0;
  std::vector<ReplicateScore> scores;
  int level = kMaxLevel;
  std::size_t vocabulary_size = 0;
};

/// Fits `replicates` models on deterministic resampled train subsets and
/// computes the pairwise Spearman matrix and eta. The vocabulary is built
/// once from the full corpus at the ensemble level, so coefficient vectors
/// share one index space; codes absent from a training subsample keep
/// coefficient 0 under the minimum-norm convention. Fully deterministic
/// given base_seed, independent of thread count.
ConsistencyReport run_ensemble(const StayCorpus& corpus, const EnsembleSpec& spec,
                               std::size_t threads = 1);

std::string to_json_string(const ConsistencyReport& report);

/// CSV of the N x p coefficient matrix (one replicate per line).
void write_coefficient_matrix_csv(const ConsistencyReport& report, std::ostream& out);

}  // namespace granreg
