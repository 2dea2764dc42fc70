#pragma once

// Test-only reference implementations, kept independent of the library's
// solve paths: dense solves go through Eigen, tiny eigenproblems through
// closed forms, and corpora come from a local generator rather than
// granreg::generate.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "granreg/design_matrix.hpp"
#include "granreg/regression.hpp"
#include "granreg/rng.hpp"
#include "granreg/stay.hpp"
#include "granreg/vocabulary.hpp"

namespace oracle {

/// Dense augmented design [X, 1] (intercept last), or plain X.
inline Eigen::MatrixXd dense_design(const granreg::SparseDesignMatrix& x, bool intercept) {
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto p = static_cast<Eigen::Index>(x.cols());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, p + (intercept ? 1 : 0));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (const auto& e : x.row(i)) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.col)) = e.value;
    }
  }
  if (intercept) m.col(p).setOnes();
  return m;
}

/// Reference solve: minimum-norm pseudo-inverse for lambda = 0, regularized
/// normal equations otherwise. Returns coefficients followed by the
/// intercept when enabled.
inline std::vector<double> dense_fit(const granreg::SparseDesignMatrix& x,
                                     const std::vector<double>& y,
                                     const granreg::FitConfig& cfg) {
  const Eigen::MatrixXd a = dense_design(x, cfg.intercept);
  Eigen::Map<const Eigen::VectorXd> b(y.data(), static_cast<Eigen::Index>(y.size()));

  Eigen::VectorXd beta;
  if (cfg.lambda == 0.0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    beta = svd.solve(b);  // minimum-norm least squares
  } else {
    const Eigen::Index d = a.cols();
    Eigen::MatrixXd h = a.transpose() * a;
    for (Eigen::Index j = 0; j < d; ++j) {
      const bool is_intercept = cfg.intercept && j == d - 1;
      if (!is_intercept || cfg.penalize_intercept) h(j, j) += cfg.lambda;
    }
    beta = h.ldlt().solve(a.transpose() * b);
  }
  return std::vector<double>(beta.data(), beta.data() + beta.size());
}

/// Eigenvalues of a symmetric 2x2 matrix, descending.
inline std::vector<double> eig2x2(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return {mean + disc, mean - disc};
}

/// Eigenvalues of a symmetric 3x3 matrix via the trigonometric closed form,
/// descending.
inline std::vector<double> eig3x3(const double m[3][3]) {
  const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
                    (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
  if (p2 <= 0.0) return {q, q, q};  // scalar matrix
  const double p = std::sqrt(p2 / 6.0);
  double bb[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) bb[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
  }
  const double detb =
      bb[0][0] * (bb[1][1] * bb[2][2] - bb[1][2] * bb[2][1]) -
      bb[0][1] * (bb[1][0] * bb[2][2] - bb[1][2] * bb[2][0]) +
      bb[0][2] * (bb[1][0] * bb[2][1] - bb[1][1] * bb[2][0]);
  const double r = std::clamp(detb / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  return {e1, e2, e3};
}

/// Small random corpora for property tests: a pool of codes with genuine
/// prefix sharing, random stays over it. Cheap enough for thousands of
/// instances.
struct RandomCorpusConfig {
  std::size_t max_stays = 500;
  std::size_t max_pool = 200;
  std::uint64_t seed = 0;
};

inline granreg::StayCorpus random_corpus(const RandomCorpusConfig& cfg) {
  granreg::Rng rng(cfg.seed);
  const std::size_t pool_size = 2 + rng.below(cfg.max_pool - 1);
  std::vector<std::string> pool;
  while (pool.size() < pool_size) {
    std::string code;
    code.push_back(static_cast<char>('A' + rng.below(4)));  // few letters => collisions
    code.push_back(static_cast<char>('0' + rng.below(3)));
    code.push_back(static_cast<char>('0' + rng.below(3)));
    const std::size_t extra = rng.below(5);
    for (std::size_t k = 0; k < extra; ++k) {
      code.push_back(static_cast<char>('0' + rng.below(4)));
    }
    pool.push_back(std::move(code));
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  const std::size_t n = 2 + rng.below(cfg.max_stays - 1);
  std::vector<granreg::StayRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = 1 + rng.below(std::min<std::size_t>(10, pool.size()));
    std::vector<granreg::IcdCode> codes;
    for (std::size_t k = 0; k < d; ++k) {
      codes.push_back(granreg::IcdCode::normalize(pool[rng.below(pool.size())]));
    }
    records.push_back(granreg::StayRecord::make(
        "r" + std::to_string(i), 100.0 + static_cast<double>(rng.below(100000)), codes));
  }
  return granreg::StayCorpus(std::move(records));
}

/// Arbitrary (non-truncation) surjective merge map onto a synthetic coarse
/// vocabulary; exercises verify_trace_monotonicity beyond prefix merges.
inline granreg::MergeMap random_merge_map(std::size_t fine_size, int fine_level,
                                          granreg::Rng& rng) {
  const std::size_t coarse_size = 1 + rng.below(fine_size);
  std::vector<std::size_t> assignments(fine_size);
  // guarantee surjectivity, then scatter the rest
  for (std::size_t t = 0; t < coarse_size; ++t) assignments[t] = t;
  for (std::size_t j = coarse_size; j < fine_size; ++j) {
    assignments[j] = rng.below(coarse_size);
  }
  for (std::size_t j = fine_size; j > 1; --j) {  // shuffle
    std::swap(assignments[j - 1], assignments[rng.below(j)]);
  }
  // surjectivity can be lost by the shuffle only if coarse targets collide;
  // it cannot: the shuffle permutes values, so every target keeps >= 1 slot.
  // 3-char names in base-36 so they fit any level and sort in build order
  const auto char36 = [](std::size_t d) {
    return d < 10 ? static_cast<char>('0' + d) : static_cast<char>('A' + (d - 10));
  };
  std::vector<std::string> coarse_codes;
  coarse_codes.reserve(coarse_size);
  for (std::size_t t = 0; t < coarse_size; ++t) {
    std::string code = "Z";
    code += char36((t / 36) % 36);
    code += char36(t % 36);
    coarse_codes.push_back(std::move(code));
  }
  return granreg::MergeMap(fine_level, fine_level - 1, std::move(assignments),
                           granreg::CodeVocabulary(fine_level - 1, std::move(coarse_codes)));
}

}  // namespace oracle
