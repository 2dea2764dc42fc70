#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "granreg/design_matrix.hpp"
#include "granreg/linalg.hpp"
#include "granreg/vocabulary.hpp"

namespace granreg {

/// Eigenvalues of a symmetric PSD matrix, sorted descending. Entries below
/// 1e-10 * max are clamped to zero and counted; the clamp defines the rank
/// used elsewhere.
struct Spectrum {
  std::vector<double> eigenvalues;
  std::size_t dimension = 0;
  double trace_error = 0.0;       // |sum - trace| / max(1, |trace|)
  std::size_t clamped = 0;        // eigenvalues zeroed by the floor

  std::size_t rank() const;
  double sum() const;
  double mean() const;
};

/// Full spectrum via a symmetric eigensolver. Requires symmetry within
/// 1e-12 (scaled by the largest entry) and dimension <= cap; verifies the
/// trace identity to 1e-8 relative.
Spectrum eigen_spectrum(const DenseMatrix& h, std::size_t cap = HessianSummary::kDefaultDenseCap);

enum class PowerLawMethod { fixed_xmin, ks_scan };

struct PowerLawFit {
  double alpha_hat = 0.0;
  double x_min = 1.0;
  std::size_t n_tail = 0;
  PowerLawMethod method = PowerLawMethod::fixed_xmin;
  double ks_distance = 0.0;
};

/// Discrete power-law MLE with the x_min - 0.5 continuity correction:
///   alpha_hat = 1 + n_tail / sum ln(x_i / (x_min - 0.5)).
/// ks_scan picks the x_min (over distinct sample values) minimizing the
/// Kolmogorov-Smirnov distance between the tail and the fitted law;
/// candidates keeping fewer than min_tail samples are skipped so the scan
/// cannot chase statistically tiny tails (min_tail = 0 means the default
/// rule max(10, n/8)). Throws InsufficientTail when fewer than 2 samples
/// reach x_min.
PowerLawFit fit_power_law(std::span<const std::int64_t> samples, PowerLawMethod method,
                          std::optional<double> x_min = std::nullopt,
                          std::size_t min_tail = 0);

/// Continuous-data MLE variant, no continuity shift:
///   alpha_hat = 1 + n / sum ln(x_i / x_min).
double power_law_mle_continuous(std::span<const double> samples, double x_min);

/// Inverse-CDF sampler for the discrete power law (continuous approximation
/// with the 0.5 shift); used by the synthetic generator and tests.
class Rng;
std::vector<std::int64_t> sample_discrete_power_law(Rng& rng, double alpha,
                                                    std::int64_t x_min, std::size_t count);

/// S_V = S_I > 1 / trace on a positive-definite matrix, with S_V from
/// the dense inverse diagonal and S_I from the eigenvalues.
struct VarianceSumReport {
  double s_v = 0.0;
  double s_i = 0.0;
  double trace = 0.0;
  double equality_error = 0.0;        // |S_V - S_I| / S_I
  double equality_tolerance = 1e-8;
  bool equality_holds = false;
  bool bound_holds = false;           // S_I > 1 / trace
  bool passed = false;
};

/// Throws SingularMatrix when the matrix is not positive definite.
VarianceSumReport verify_variance_sum_identity(const DenseMatrix& h,
                             std::size_t cap = HessianSummary::kDefaultDenseCap);

/// Trace monotonicity under column merging, plus the exact identity
/// delta = 2 * (co-occurrence mass of merged pairs). Integer arithmetic.
struct TraceMergeReport {
  std::int64_t trace_before = 0;
  std::int64_t trace_after = 0;
  std::int64_t delta = 0;
  std::int64_t merged_pair_mass = 0;  // sum over unordered merged pairs
  bool monotone = false;              // trace_after >= trace_before
  bool identity_holds = false;        // delta == 2 * merged_pair_mass
  bool passed = false;
};

TraceMergeReport verify_trace_monotonicity(const SparseDesignMatrix& x, const MergeMap& map);

std::string to_json_string(const VarianceSumReport& report);
std::string to_json_string(const TraceMergeReport& report);
std::string to_json_string(const PowerLawFit& fit);

/// CSV export `index,eigenvalue` with a schema comment line.
void write_spectrum_csv(const Spectrum& spectrum, std::ostream& out);

}  // namespace granreg
