#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "granreg/icd.hpp"

namespace granreg {

/// Cap on diagnosis codes per stay (claims records allot 25 slots).
inline constexpr std::size_t kMaxCodesPerStay = 25;

/// One inpatient stay: positive cost, its base-10 log, and 1-25 distinct
/// diagnosis codes. Duplicate codes in raw input collapse on construction;
/// predictors are binary presence indicators.
struct StayRecord {
  std::string stay_id;
  double cost = 0.0;
  double log_cost = 0.0;
  std::vector<IcdCode> codes;  // sorted, unique

  /// Validates and builds a record. Throws ValidationError on cost <= 0,
  /// an empty code list, or more than 25 raw codes.
  static StayRecord make(std::string stay_id, double cost, std::vector<IcdCode> codes);
};

/// Immutable, ordered collection of stay records. Never empty.
class StayCorpus {
 public:
  explicit StayCorpus(std::vector<StayRecord> records);

  std::size_t size() const { return records_.size(); }
  const StayRecord& operator[](std::size_t i) const { return records_[i]; }

  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  /// Outcome vector y_i = log10(cost_i) in record order.
  std::vector<double> log_costs() const;

 private:
  std::vector<StayRecord> records_;
};

/// Disjoint, exhaustive train/test index sets over [0, n). Both sides are
/// sorted ascending.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Deterministic shuffle split: |train| = round(train_ratio * n), clamped to
/// [1, n-1] so neither side is empty. Throws DegenerateSplit when n < 2 or
/// the ratio is outside (0, 1).
Split split_indices(std::size_t n, double train_ratio, std::uint64_t seed);
Split split(const StayCorpus& corpus, double train_ratio, std::uint64_t seed);

/// Per code-count bucket statistics (bucket k = stays carrying k codes).
struct CodeCountBucket {
  std::size_t code_count = 0;
  std::size_t stays = 0;
  double mean_cost = 0.0;
  double mean_log_cost = 0.0;
};

struct CorpusSummary {
  std::vector<CodeCountBucket> buckets;  // ascending code_count, empty buckets omitted
  std::size_t n = 0;
  double mean_log_cost = 0.0;
  double stddev_log_cost = 0.0;  // sample standard deviation
};

CorpusSummary summarize(const StayCorpus& corpus);

}  // namespace granreg
