#include "granreg/stay.hpp"

#include <algorithm>
#include <cmath>

#include "granreg/errors.hpp"
#include "granreg/rng.hpp"

namespace granreg {

StayRecord StayRecord::make(std::string stay_id, double cost, std::vector<IcdCode> codes) {
  if (!(cost > 0.0) || !std::isfinite(cost)) {
    throw ValidationError("stay '" + stay_id + "': cost must be positive and finite");
  }
  if (codes.empty()) {
    throw ValidationError("stay '" + stay_id + "': no diagnosis codes");
  }
  if (codes.size() > kMaxCodesPerStay) {
    throw ValidationError("stay '" + stay_id + "': " + std::to_string(codes.size()) +
                          " codes exceeds the 25-code cap");
  }
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());

  StayRecord rec;
  rec.stay_id = std::move(stay_id);
  rec.cost = cost;
  rec.log_cost = std::log10(cost);
  rec.codes = std::move(codes);
  return rec;
}

StayCorpus::StayCorpus(std::vector<StayRecord> records) : records_(std::move(records)) {
  if (records_.empty()) throw EmptyCorpus("corpus has no records");
}

std::vector<double> StayCorpus::log_costs() const {
  std::vector<double> y;
  y.reserve(records_.size());
  for (const auto& r : records_) y.push_back(r.log_cost);
  return y;
}

Split split_indices(std::size_t n, double train_ratio, std::uint64_t seed) {
  if (n < 2) throw DegenerateSplit("cannot split " + std::to_string(n) + " records");
  if (!(train_ratio > 0.0) || !(train_ratio < 1.0)) {
    throw DegenerateSplit("train_ratio must lie in (0, 1)");
  }
  auto n_train = static_cast<std::size_t>(
      std::llround(train_ratio * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {  // Fisher-Yates
    const std::size_t j = rng.below(i + 1);
    std::swap(order[i], order[j]);
  }

  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Split split(const StayCorpus& corpus, double train_ratio, std::uint64_t seed) {
  return split_indices(corpus.size(), train_ratio, seed);
}

CorpusSummary summarize(const StayCorpus& corpus) {
  struct Acc {
    std::size_t count = 0;
    double cost_sum = 0.0;
    double log_sum = 0.0;
  };
  std::vector<Acc> acc(kMaxCodesPerStay + 1);

  double total_log = 0.0;
  for (const auto& rec : corpus) {
    auto& a = acc[rec.codes.size()];
    a.count += 1;
    a.cost_sum += rec.cost;
    a.log_sum += rec.log_cost;
    total_log += rec.log_cost;
  }

  CorpusSummary out;
  out.n = corpus.size();
  out.mean_log_cost = total_log / static_cast<double>(out.n);

  double ss = 0.0;
  for (const auto& rec : corpus) {
    const double d = rec.log_cost - out.mean_log_cost;
    ss += d * d;
  }
  out.stddev_log_cost = out.n > 1 ? std::sqrt(ss / static_cast<double>(out.n - 1)) : 0.0;

  for (std::size_t k = 1; k <= kMaxCodesPerStay; ++k) {
    if (acc[k].count == 0) continue;
    CodeCountBucket b;
    b.code_count = k;
    b.stays = acc[k].count;
    b.mean_cost = acc[k].cost_sum / static_cast<double>(acc[k].count);
    b.mean_log_cost = acc[k].log_sum / static_cast<double>(acc[k].count);
    out.buckets.push_back(b);
  }
  return out;
}

}  // namespace granreg
