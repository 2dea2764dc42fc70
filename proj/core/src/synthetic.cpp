#include "granreg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "granreg/errors.hpp"
#include "granreg/rng.hpp"
#include "granreg/spectra.hpp"

namespace granreg {

namespace {

constexpr char kDigits[] = "0123456789";
constexpr char kAlnum[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Per-length share of the code universe, shaped after the distinct-prefix
/// growth of real ICD-10-CM vocabularies so that p^(l) decays smoothly as
/// the level drops.
constexpr double kLengthShare[5] = {0.08, 0.27, 0.27, 0.25, 0.13};  // lengths 3..7

std::vector<std::size_t> length_counts(std::size_t n_codes) {
  std::vector<std::size_t> counts(5, 0);
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    counts[k] = static_cast<std::size_t>(std::floor(kLengthShare[k] *
                                                    static_cast<double>(n_codes)));
    assigned += counts[k];
  }
  std::size_t k = 0;
  while (assigned < n_codes) {  // round-robin the remainder, shortest first
    counts[k % 5] += 1;
    ++assigned;
    ++k;
  }
  // every non-empty universe needs roots to extend
  if (n_codes > 0 && counts[0] == 0) {
    for (std::size_t j = 4; j > 0; --j) {
      if (counts[j] > 0) {
        counts[j] -= 1;
        counts[0] += 1;
        break;
      }
    }
  }
  return counts;
}

/// Grows the code universe level by level: length-3 roots are fresh
/// letter+digit+digit strings, longer codes extend a random existing code
/// one character shorter. Prefix sharing is what gives the granularity
/// sweeps their merging structure.
std::vector<std::string> generate_code_universe(std::size_t n_codes, Rng& rng) {
  const auto counts = length_counts(n_codes);
  std::unordered_set<std::string> used;
  std::vector<std::vector<std::string>> by_length(5);

  for (std::size_t li = 0; li < 5; ++li) {
    const std::size_t length = li + 3;
    auto& pool = by_length[li];
    pool.reserve(counts[li]);
    std::size_t guard = 0;
    while (pool.size() < counts[li]) {
      if (++guard > 100 * counts[li] + 1000) {
        throw ConfigError("generate: cannot synthesize " + std::to_string(counts[li]) +
                          " distinct codes of length " + std::to_string(length));
      }
      std::string code;
      if (li == 0) {
        code.push_back(static_cast<char>('A' + rng.below(26)));
        code.push_back(kDigits[rng.below(10)]);
        code.push_back(kDigits[rng.below(10)]);
      } else {
        const auto& bases = by_length[li - 1];
        if (bases.empty()) {
          throw ConfigError("generate: no length-" + std::to_string(length - 1) +
                            " codes to extend");
        }
        code = bases[rng.below(bases.size())];
        code.push_back(kAlnum[rng.below(36)]);
      }
      if (used.insert(code).second) pool.push_back(code);
    }
  }

  std::vector<std::string> codes;
  codes.reserve(n_codes);
  for (const auto& pool : by_length) {
    codes.insert(codes.end(), pool.begin(), pool.end());
  }
  std::sort(codes.begin(), codes.end());
  return codes;
}

/// Walker alias table for O(1) draws proportional to integer weights.
class AliasTable {
 public:
  AliasTable(std::span<const std::int64_t> weights) {
    const std::size_t n = weights.size();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    double total = 0.0;
    for (const auto w : weights) total += static_cast<double>(w);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = static_cast<double>(weights[i]) * static_cast<double>(n) / total;
    }
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      const std::size_t l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (const auto i : large) prob_[i] = 1.0;
    for (const auto i : small) prob_[i] = 1.0;
  }

  std::size_t draw(Rng& rng) const {
    const std::size_t i = rng.below(prob_.size());
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

/// Right-truncated geometric pmf on {1..d_max} with the requested mean,
/// solved for the continuation probability by bisection.
std::vector<double> truncated_geometric_cdf(double mean, int d_max) {
  const auto mean_for = [&](double q) {
    // pmf(k) proportional to q^(k-1)
    double norm = 0.0, acc = 0.0, w = 1.0;
    for (int k = 1; k <= d_max; ++k) {
      norm += w;
      acc += static_cast<double>(k) * w;
      w *= q;
    }
    return acc / norm;
  };
  double lo = 0.0, hi = 1.0;
  // q -> 1 pushes the truncated mean to (d_max + 1) / 2 and beyond via hi > 1
  if (mean > (static_cast<double>(d_max) + 1.0) / 2.0) hi = 8.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (mean_for(mid) < mean ? lo : hi) = mid;
  }
  const double q = 0.5 * (lo + hi);

  std::vector<double> cdf(static_cast<std::size_t>(d_max));
  double w = 1.0, norm = 0.0;
  for (int k = 0; k < d_max; ++k) {
    norm += w;
    cdf[static_cast<std::size_t>(k)] = norm;
    w *= q;
  }
  for (auto& c : cdf) c /= norm;
  return cdf;
}

int draw_code_count(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(it - cdf.begin()) + 1;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_stays == 0) throw ConfigError("generator: n_stays must be positive");
  if (n_codes == 0) throw ConfigError("generator: n_codes must be positive");
  if (!(alpha > 1.0)) throw ConfigError("generator: alpha must exceed 1");
  if (d_max < 1 || d_max > static_cast<int>(kMaxCodesPerStay)) {
    throw ConfigError("generator: d_max must lie in [1, 25]");
  }
  if (!(d_mean >= 1.0) || d_mean > static_cast<double>(d_max)) {
    throw ConfigError("generator: d_mean must lie in [1, d_max]");
  }
  if (noise_sigma < 0.0) throw ConfigError("generator: noise_sigma must be >= 0");
  if (beta_scale < 0.0) throw ConfigError("generator: beta_scale must be >= 0");
}

SyntheticData generate(const GeneratorConfig& config) {
  config.validate();
  Rng rng(config.seed);

  const std::vector<std::string> codes = generate_code_universe(config.n_codes, rng);
  const std::size_t p = codes.size();

  const std::vector<std::int64_t> popularity =
      sample_discrete_power_law(rng, config.alpha, 1, p);
  const AliasTable alias(popularity);

  std::vector<double> beta(p);
  for (auto& b : beta) b = rng.normal(0.0, config.beta_scale);

  const auto d_cdf = truncated_geometric_cdf(config.d_mean, config.d_max);

  // normalized codes for record construction
  std::vector<IcdCode> icd;
  icd.reserve(p);
  for (const auto& c : codes) icd.push_back(IcdCode::normalize(c));

  std::vector<StayRecord> records;
  records.reserve(config.n_stays);
  std::vector<std::size_t> picked;
  std::vector<char> in_stay(p, 0);
  char id_buf[24];

  for (std::size_t i = 0; i < config.n_stays; ++i) {
    const int d = std::min(draw_code_count(d_cdf, rng), static_cast<int>(p));
    picked.clear();
    while (picked.size() < static_cast<std::size_t>(d)) {
      const std::size_t j = alias.draw(rng);
      if (in_stay[j]) continue;  // distinct codes within a stay
      in_stay[j] = 1;
      picked.push_back(j);
    }
    double log_cost = config.beta0;
    std::vector<IcdCode> stay_codes;
    stay_codes.reserve(picked.size());
    for (const auto j : picked) {
      log_cost += beta[j];
      stay_codes.push_back(icd[j]);
      in_stay[j] = 0;
    }
    if (config.noise_sigma > 0.0) log_cost += rng.normal(0.0, config.noise_sigma);

    std::snprintf(id_buf, sizeof(id_buf), "s%08zu", i + 1);
    records.push_back(
        StayRecord::make(id_buf, std::pow(10.0, log_cost), std::move(stay_codes)));
  }

  GroundTruth truth;
  truth.beta0 = config.beta0;
  truth.codes = codes;
  truth.beta = std::move(beta);
  truth.noise_sigma = config.noise_sigma;
  return SyntheticData{StayCorpus(std::move(records)), std::move(truth)};
}

double calibrate_noise(const GeneratorConfig& config, double target_r2) {
  if (!(target_r2 > 0.0) || !(target_r2 < 1.0)) {
    throw ConfigError("calibrate_noise: target_r2 must lie in (0, 1)");
  }
  GeneratorConfig pilot = config;
  pilot.noise_sigma = 0.0;
  pilot.n_stays = std::min<std::size_t>(config.n_stays, 20000);
  const SyntheticData data = generate(pilot);

  double mean = 0.0;
  for (const auto& rec : data.corpus) mean += rec.log_cost;
  mean /= static_cast<double>(data.corpus.size());
  double signal_var = 0.0;
  for (const auto& rec : data.corpus) {
    signal_var += (rec.log_cost - mean) * (rec.log_cost - mean);
  }
  signal_var /= static_cast<double>(data.corpus.size());
  if (signal_var <= 0.0) throw ConfigError("calibrate_noise: pilot has zero signal variance");

  // R^2 = v_s / (v_s + sigma^2)  =>  sigma = sqrt(v_s (1 - R^2) / R^2)
  return std::sqrt(signal_var * (1.0 - target_r2) / target_r2);
}

void write_ground_truth_json(const GroundTruth& truth, const GeneratorConfig& config,
                             const std::filesystem::path& path) {
  nlohmann::json j;
  j["true_beta0"] = truth.beta0;
  nlohmann::json betas = nlohmann::json::object();
  for (std::size_t i = 0; i < truth.codes.size(); ++i) {
    betas[truth.codes[i]] = truth.beta[i];
  }
  j["true_beta"] = std::move(betas);
  j["noise_sigma"] = truth.noise_sigma;
  j["config"] = {{"n_stays", config.n_stays}, {"n_codes", config.n_codes},
                 {"alpha", config.alpha},     {"d_mean", config.d_mean},
                 {"d_max", config.d_max},     {"beta_scale", config.beta_scale},
                 {"beta0", config.beta0},     {"noise_sigma", config.noise_sigma},
                 {"seed", config.seed}};

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

}  // namespace granreg
