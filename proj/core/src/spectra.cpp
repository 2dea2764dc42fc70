#include "granreg/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "granreg/errors.hpp"
#include "granreg/rng.hpp"

namespace granreg {

namespace {
constexpr double kEigenvalueFloor = 1e-10;  // relative to the largest eigenvalue
}

std::size_t Spectrum::rank() const {
  std::size_t r = 0;
  for (const double s : eigenvalues) {
    if (s > 0.0) ++r;
  }
  return r;
}

double Spectrum::sum() const {
  double acc = 0.0;
  for (const double s : eigenvalues) acc += s;
  return acc;
}

double Spectrum::mean() const {
  return eigenvalues.empty() ? 0.0 : sum() / static_cast<double>(eigenvalues.size());
}

Spectrum eigen_spectrum(const DenseMatrix& h, std::size_t cap) {
  const std::size_t dim = h.dim();
  if (dim > cap) {
    throw CapExceeded("eigen_spectrum: dimension " + std::to_string(dim) +
                      " exceeds cap " + std::to_string(cap));
  }
  const double scale = std::max(1.0, h.max_abs());
  if (h.symmetry_error() > 1e-12 * scale) {
    throw NotSymmetric("eigen_spectrum: matrix is not symmetric within tolerance");
  }

  Eigen::Map<const Eigen::MatrixXd> mapped(h.data().data(), static_cast<Eigen::Index>(dim),
                                           static_cast<Eigen::Index>(dim));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mapped, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("eigen_spectrum: eigensolver failed to converge");
  }

  Spectrum spec;
  spec.dimension = dim;
  spec.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + dim);
  std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(), std::greater<>());

  const double max_eig = spec.eigenvalues.empty() ? 0.0 : spec.eigenvalues.front();
  const double floor = kEigenvalueFloor * std::max(0.0, max_eig);
  for (double& s : spec.eigenvalues) {
    if (s < -floor) {
      throw Error("eigen_spectrum: matrix is not positive semidefinite (eigenvalue " +
                  std::to_string(s) + ")");
    }
    if (s <= floor) {
      if (s != 0.0) ++spec.clamped;
      s = 0.0;
    }
  }

  const double trace = h.trace();
  spec.trace_error = std::abs(spec.sum() - trace) / std::max(1.0, std::abs(trace));
  if (spec.trace_error > 1e-8) {
    throw Error("eigen_spectrum: trace identity violated (relative error " +
                std::to_string(spec.trace_error) + ")");
  }
  return spec;
}

namespace {

double discrete_mle(std::span<const double> tail, double x_min) {
  double log_sum = 0.0;
  for (const double x : tail) log_sum += std::log(x / (x_min - 0.5));
  return 1.0 + static_cast<double>(tail.size()) / log_sum;
}

/// KS distance between the empirical tail CCDF and the continuity-corrected
/// model CCDF ((x - 0.5)/(x_min - 0.5))^{1 - alpha}, over sorted tail values.
double ks_distance(std::span<const double> sorted_tail, double x_min, double alpha) {
  const double n = static_cast<double>(sorted_tail.size());
  double worst = 0.0;
  std::size_t i = 0;
  while (i < sorted_tail.size()) {
    std::size_t j = i;
    while (j < sorted_tail.size() && sorted_tail[j] == sorted_tail[i]) ++j;
    const double x = sorted_tail[i];
    const double model_ccdf =
        std::pow((x - 0.5) / (x_min - 0.5), 1.0 - alpha);        // P(X >= x)
    const double empirical_above = (n - static_cast<double>(i)) / n;  // fraction >= x
    const double empirical_below = (n - static_cast<double>(j)) / n;  // fraction > x
    worst = std::max(worst, std::abs(empirical_above - model_ccdf));
    worst = std::max(worst, std::abs(empirical_below - model_ccdf));
    i = j;
  }
  return worst;
}

}  // namespace

PowerLawFit fit_power_law(std::span<const std::int64_t> samples, PowerLawMethod method,
                          std::optional<double> x_min, std::size_t min_tail) {
  std::vector<double> sorted;
  sorted.reserve(samples.size());
  for (const auto v : samples) {
    if (v >= 1) sorted.push_back(static_cast<double>(v));
  }
  std::sort(sorted.begin(), sorted.end());
  if (min_tail == 0) min_tail = std::max<std::size_t>(10, sorted.size() / 8);

  const auto tail_from = [&](double cut) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), cut);
    const auto offset = static_cast<std::size_t>(it - sorted.begin());
    return std::span<const double>(sorted.data() + offset, sorted.size() - offset);
  };

  PowerLawFit fit;
  fit.method = method;

  if (method == PowerLawMethod::fixed_xmin) {
    fit.x_min = x_min.value_or(1.0);
    const auto tail = tail_from(fit.x_min);
    if (tail.size() < 2) {
      throw InsufficientTail("fit_power_law: fewer than 2 samples at or above x_min");
    }
    fit.n_tail = tail.size();
    fit.alpha_hat = discrete_mle(tail, fit.x_min);
    fit.ks_distance = ks_distance(tail, fit.x_min, fit.alpha_hat);
    return fit;
  }

  // ks_scan: candidates are the distinct sample values leaving at least
  // min_tail samples; keep the cut minimizing the KS distance.
  std::vector<double> candidates(sorted.begin(), sorted.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  bool found = false;
  for (const double cut : candidates) {
    const auto tail = tail_from(cut);
    if (tail.size() < std::max<std::size_t>(2, min_tail)) break;
    const double alpha = discrete_mle(tail, cut);
    if (!(alpha > 1.0) || !std::isfinite(alpha)) continue;
    const double ks = ks_distance(tail, cut, alpha);
    if (!found || ks < fit.ks_distance) {
      found = true;
      fit.x_min = cut;
      fit.n_tail = tail.size();
      fit.alpha_hat = alpha;
      fit.ks_distance = ks;
    }
  }
  if (!found) throw InsufficientTail("fit_power_law: no viable x_min candidate");
  return fit;
}

double power_law_mle_continuous(std::span<const double> samples, double x_min) {
  if (samples.size() < 2) {
    throw InsufficientTail("power_law_mle_continuous: fewer than 2 samples");
  }
  double log_sum = 0.0;
  std::size_t n = 0;
  for (const double x : samples) {
    if (x < x_min) continue;
    log_sum += std::log(x / x_min);
    ++n;
  }
  if (n < 2) throw InsufficientTail("power_law_mle_continuous: tail too small");
  return 1.0 + static_cast<double>(n) / log_sum;
}

std::vector<std::int64_t> sample_discrete_power_law(Rng& rng, double alpha,
                                                    std::int64_t x_min, std::size_t count) {
  if (!(alpha > 1.0)) throw ConfigError("sample_discrete_power_law: alpha must exceed 1");
  std::vector<std::int64_t> out;
  out.reserve(count);
  const double exponent = -1.0 / (alpha - 1.0);
  const double shift = static_cast<double>(x_min) - 0.5;
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform();
    const double x = shift * std::pow(1.0 - u, exponent) + 0.5;
    // clamp against overflow from extreme tail draws
    const double capped = std::min(x, 9.0e18);
    out.push_back(std::max<std::int64_t>(x_min, static_cast<std::int64_t>(capped)));
  }
  return out;
}

VarianceSumReport verify_variance_sum_identity(const DenseMatrix& h, std::size_t cap) {
  const auto chol = cholesky(h);
  if (!chol) throw SingularMatrix("verify_variance_sum_identity: matrix is not positive definite");

  VarianceSumReport report;
  const auto diag = inverse_diagonal(*chol);
  for (const double v : diag) report.s_v += v;

  const Spectrum spectrum = eigen_spectrum(h, cap);
  for (const double s : spectrum.eigenvalues) {
    if (s <= 0.0) throw SingularMatrix("verify_variance_sum_identity: zero eigenvalue");
    report.s_i += 1.0 / s;
  }

  report.trace = h.trace();
  report.equality_error = std::abs(report.s_v - report.s_i) / report.s_i;
  report.equality_holds = report.equality_error <= report.equality_tolerance;
  report.bound_holds = report.s_i > 1.0 / report.trace;
  report.passed = report.equality_holds && report.bound_holds;
  return report;
}

TraceMergeReport verify_trace_monotonicity(const SparseDesignMatrix& x, const MergeMap& map) {
  if (map.source_size() != x.cols()) {
    throw ShapeMismatch("verify_trace_monotonicity: merge map does not match matrix columns");
  }
  TraceMergeReport report;

  // traces from the row structure, exact integer arithmetic
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (const auto& e : x.row(i)) {
      report.trace_before += static_cast<std::int64_t>(e.value) * e.value;
    }
  }
  const SparseDesignMatrix merged = merge_columns(x, map);
  for (std::size_t i = 0; i < merged.rows(); ++i) {
    for (const auto& e : merged.row(i)) {
      report.trace_after += static_cast<std::int64_t>(e.value) * e.value;
    }
  }
  report.delta = report.trace_after - report.trace_before;

  // independent route: co-occurrence mass of merged pairs from the dense
  // Gram of the fine matrix
  const auto summary = hessian_summary(x, x.cols());
  std::vector<std::vector<std::size_t>> groups(map.target_size());
  for (std::size_t j = 0; j < map.source_size(); ++j) {
    groups[map.target_of(j)].push_back(j);
  }
  for (const auto& group : groups) {
    for (std::size_t a = 0; a < group.size(); ++a) {
      for (std::size_t b = a + 1; b < group.size(); ++b) {
        report.merged_pair_mass += summary.co_occurrence(group[a], group[b]);
      }
    }
  }

  report.monotone = report.trace_after >= report.trace_before;
  report.identity_holds = report.delta == 2 * report.merged_pair_mass;
  report.passed = report.monotone && report.identity_holds;
  return report;
}

std::string to_json_string(const VarianceSumReport& report) {
  nlohmann::json j;
  j["s_v"] = report.s_v;
  j["s_i"] = report.s_i;
  j["trace"] = report.trace;
  j["trace_lower_bound"] = 1.0 / report.trace;
  j["equality_error"] = report.equality_error;
  j["equality_tolerance"] = report.equality_tolerance;
  j["equality_holds"] = report.equality_holds;
  j["bound_holds"] = report.bound_holds;
  j["passed"] = report.passed;
  return j.dump(2);
}

std::string to_json_string(const TraceMergeReport& report) {
  nlohmann::json j;
  j["trace_before"] = report.trace_before;
  j["trace_after"] = report.trace_after;
  j["delta"] = report.delta;
  j["merged_pair_mass"] = report.merged_pair_mass;
  j["monotone"] = report.monotone;
  j["identity_holds"] = report.identity_holds;
  j["passed"] = report.passed;
  return j.dump(2);
}

std::string to_json_string(const PowerLawFit& fit) {
  nlohmann::json j;
  j["alpha_hat"] = fit.alpha_hat;
  j["x_min"] = fit.x_min;
  j["n_tail"] = fit.n_tail;
  j["method"] = fit.method == PowerLawMethod::ks_scan ? "ks_scan" : "fixed_xmin";
  j["ks_distance"] = fit.ks_distance;
  return j.dump(2);
}

void write_spectrum_csv(const Spectrum& spectrum, std::ostream& out) {
  out << "# granreg-csv v1 spectrum\n";
  out << "index,eigenvalue\n";
  char buf[64];
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g", i, spectrum.eigenvalues[i]);
    out << buf << '\n';
  }
}

}  // namespace granreg
