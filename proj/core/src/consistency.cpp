#include "granreg/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "granreg/errors.hpp"
#include "granreg/parallel.hpp"
#include "granreg/vocabulary.hpp"

namespace granreg {

namespace {

/// Fractional ranks (ties averaged), 1-based.
std::vector<double> fractional_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // average of i+1 .. j+1
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  return cov / std::sqrt(var_a * var_b);
}

bool is_constant(std::span<const double> v) {
  for (const double x : v) {
    if (x != v.front()) return false;
  }
  return true;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeMismatch("spearman: length mismatch");
  if (a.size() < 2) throw ShapeMismatch("spearman: need at least 2 entries");
  if (is_constant(a)) throw DegenerateVector("spearman: first vector is constant");
  if (is_constant(b)) throw DegenerateVector("spearman: second vector is constant");
  const auto ra = fractional_ranks(a);
  const auto rb = fractional_ranks(b);
  return pearson(ra, rb);
}

double eta(std::span<const std::vector<double>> coefficient_rows) {
  const std::size_t n = coefficient_rows.size();
  if (n < 2) throw ShapeMismatch("eta: need at least 2 replicates");
  double acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      try {
        acc += spearman(coefficient_rows[a], coefficient_rows[b]);
      } catch (const DegenerateVector& e) {
        throw DegenerateVector(std::string(e.what()) + " (replicate pair " +
                               std::to_string(a) + "," + std::to_string(b) + ")");
      }
    }
  }
  // ordered-pair normalization N(N-1) over the doubled unordered sum
  return 2.0 * acc / (static_cast<double>(n) * static_cast<double>(n - 1));
}

ConsistencyReport run_ensemble(const StayCorpus& corpus, const EnsembleSpec& spec,
                               std::size_t threads) {
  if (spec.replicates < 2) throw ConfigError("run_ensemble: need at least 2 replicates");

  const CodeVocabulary vocab = build_vocabulary(corpus, spec.level);
  const SparseDesignMatrix x = SparseDesignMatrix::build(corpus, vocab);
  const std::vector<double> y = corpus.log_costs();

  ConsistencyReport report;
  report.level = spec.level;
  report.vocabulary_size = vocab.size();
  report.coefficients.resize(spec.replicates);
  report.scores.resize(spec.replicates);

  std::vector<std::string> failures(spec.replicates);
  const auto run_replicate = [&](std::size_t r) {
    try {
      const Split s = split_indices(corpus.size(), spec.train_ratio,
                                    spec.base_seed + static_cast<std::uint64_t>(r));
      const SparseDesignMatrix x_train = x.select_rows(s.train);
      const SparseDesignMatrix x_test = x.select_rows(s.test);
      std::vector<double> y_train, y_test;
      y_train.reserve(s.train.size());
      y_test.reserve(s.test.size());
      for (const auto i : s.train) y_train.push_back(y[i]);
      for (const auto i : s.test) y_test.push_back(y[i]);

      const FitResult f = fit(x_train, y_train, spec.fit);

      ReplicateScore score;
      score.train_r2 = r2_score(y_train, predict(f, x_train));
      score.test_r2 = r2_score(y_test, predict(f, x_test));
      score.iterations = f.iterations;
      score.converged = f.converged;
      report.scores[r] = score;

      std::vector<double> row;
      row.reserve(f.coefficients.size() + 1);
      if (spec.include_intercept) row.push_back(f.intercept);
      row.insert(row.end(), f.coefficients.begin(), f.coefficients.end());
      report.coefficients[r] = std::move(row);
    } catch (const std::exception& e) {
      failures[r] = e.what();
    }
  };

  parallel_for(spec.replicates, threads, run_replicate);

  for (std::size_t r = 0; r < spec.replicates; ++r) {
    if (!failures[r].empty()) {
      throw Error("run_ensemble: replicate " + std::to_string(r) + " failed: " + failures[r]);
    }
  }

  for (std::size_t a = 0; a < spec.replicates; ++a) {
    for (std::size_t b = a + 1; b < spec.replicates; ++b) {
      PairCorrelation pc;
      pc.a = a;
      pc.b = b;
      try {
        pc.r_s = spearman(report.coefficients[a], report.coefficients[b]);
      } catch (const DegenerateVector& e) {
        throw DegenerateVector(std::string(e.what()) + " (replicate pair " +
                               std::to_string(a) + "," + std::to_string(b) + ")");
      }
      report.pairwise.push_back(pc);
    }
  }
  double acc = 0.0;
  for (const auto& pc : report.pairwise) acc += pc.r_s;
  report.eta = 2.0 * acc / (static_cast<double>(spec.replicates) *
                            static_cast<double>(spec.replicates - 1));
  return report;
}

std::string to_json_string(const ConsistencyReport& report) {
  nlohmann::json j;
  j["eta"] = report.eta;
  j["level"] = report.level;
  j["replicates"] = report.coefficients.size();
  j["vocabulary_size"] = report.vocabulary_size;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& pc : report.pairwise) {
    pairs.push_back({{"a", pc.a}, {"b", pc.b}, {"r_s", pc.r_s}});
  }
  j["pairwise"] = std::move(pairs);
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& s : report.scores) {
    scores.push_back({{"train_r2", s.train_r2},
                      {"test_r2", s.test_r2},
                      {"iterations", s.iterations},
                      {"converged", s.converged}});
  }
  j["replicate_scores"] = std::move(scores);
  return j.dump(2);
}

void write_coefficient_matrix_csv(const ConsistencyReport& report, std::ostream& out) {
  out << "# granreg-csv v1 coefficient-matrix\n";
  char buf[64];
  for (const auto& row : report.coefficients) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace granreg
