#include "granreg/regression.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "granreg/errors.hpp"
#include "granreg/linalg.hpp"
#include "granreg/lsqr.hpp"
#include "granreg/spectra.hpp"

namespace granreg {

namespace {

/// [X, 1] with sqrt(lambda) penalty rows stacked underneath. Column p is
/// the intercept when enabled.
class AugmentedDesignOperator final : public LinearOperator {
 public:
  AugmentedDesignOperator(const SparseDesignMatrix& x, const FitConfig& cfg)
      : x_(x), intercept_(cfg.intercept), sqrt_lambda_(std::sqrt(cfg.lambda)) {
    n_cols_ = x.cols() + (intercept_ ? 1 : 0);
    n_penalized_ = 0;
    if (cfg.lambda > 0.0) {
      n_penalized_ = x.cols() + ((intercept_ && cfg.penalize_intercept) ? 1 : 0);
    }
  }

  std::size_t rows() const override { return x_.rows() + n_penalized_; }
  std::size_t cols() const override { return n_cols_; }

  void apply(std::span<const double> v, std::span<double> y) const override {
    x_.apply(v.subspan(0, x_.cols()), y.subspan(0, x_.rows()));
    if (intercept_) {
      const double b0 = v[x_.cols()];
      for (std::size_t i = 0; i < x_.rows(); ++i) y[i] += b0;
    }
    for (std::size_t k = 0; k < n_penalized_; ++k) {
      y[x_.rows() + k] = sqrt_lambda_ * v[k];
    }
  }

  void apply_transpose(std::span<const double> r, std::span<double> out) const override {
    x_.apply_transpose(r.subspan(0, x_.rows()), out.subspan(0, x_.cols()));
    if (intercept_) {
      double acc = 0.0;
      for (std::size_t i = 0; i < x_.rows(); ++i) acc += r[i];
      out[x_.cols()] = acc;
    }
    for (std::size_t k = 0; k < n_penalized_; ++k) {
      out[k] += sqrt_lambda_ * r[x_.rows() + k];
    }
  }

 private:
  const SparseDesignMatrix& x_;
  bool intercept_;
  double sqrt_lambda_;
  std::size_t n_cols_ = 0;
  std::size_t n_penalized_ = 0;
};

}  // namespace

FitResult fit(const SparseDesignMatrix& x, std::span<const double> y,
              const FitConfig& config) {
  if (y.size() != x.rows()) {
    throw ShapeMismatch("fit: outcome length " + std::to_string(y.size()) +
                        " does not match " + std::to_string(x.rows()) + " rows");
  }
  if (x.rows() == 0) throw ShapeMismatch("fit: design matrix has no rows");
  if (config.lambda < 0.0) throw ConfigError("fit: lambda must be non-negative");
  if (!(config.tolerance > 0.0)) throw ConfigError("fit: tolerance must be positive");

  AugmentedDesignOperator op(x, config);

  std::vector<double> rhs(op.rows(), 0.0);
  std::copy(y.begin(), y.end(), rhs.begin());  // penalty rows keep rhs 0

  LsqrOptions options;
  options.tolerance = config.tolerance;
  options.max_iterations =
      config.max_iterations > 0 ? config.max_iterations : 10 * (x.cols() + 1);

  const LsqrResult solved = lsqr_solve(op, rhs, options);

  FitResult result;
  result.config = config;
  result.coefficients.assign(solved.x.begin(),
                             solved.x.begin() + static_cast<std::ptrdiff_t>(x.cols()));
  result.intercept = config.intercept ? solved.x[x.cols()] : 0.0;
  result.iterations = solved.iterations;
  result.relative_residual = solved.relative_residual;
  result.converged = solved.converged;
  return result;
}

std::vector<double> predict(const FitResult& fit, const SparseDesignMatrix& x) {
  if (fit.coefficients.size() != x.cols()) {
    throw ShapeMismatch("predict: " + std::to_string(fit.coefficients.size()) +
                        " coefficients vs " + std::to_string(x.cols()) + " columns");
  }
  std::vector<double> y_hat(x.rows(), 0.0);
  x.apply(fit.coefficients, y_hat);
  for (double& v : y_hat) v += fit.intercept;
  return y_hat;
}

double r2_score(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw ShapeMismatch("r2_score: length mismatch");
  if (y.size() < 2) throw ShapeMismatch("r2_score: need at least 2 observations");
  double mean = 0.0;
  for (const double v : y) mean += v;
  mean /= static_cast<double>(y.size());

  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sse += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
    sst += (y[i] - mean) * (y[i] - mean);
  }
  if (sst == 0.0) throw DegenerateOutcome("r2_score: outcome vector is constant");
  return 1.0 - sse / sst;
}

VarianceReport coefficient_variances(const SparseDesignMatrix& x, std::span<const double> y,
                                     const FitResult& fit, std::size_t dense_cap) {
  const bool intercept = fit.config.intercept;
  const std::size_t dim = x.cols() + (intercept ? 1 : 0);
  if (dim > dense_cap) {
    throw CapExceeded("coefficient_variances: dimension " + std::to_string(dim) +
                      " exceeds dense cap " + std::to_string(dense_cap));
  }

  const DenseMatrix regularized =
      intercept ? augmented_hessian(x, fit.config.lambda, fit.config.penalize_intercept,
                                    dense_cap)
                : plain_hessian(x, fit.config.lambda, dense_cap);
  const auto chol = cholesky(regularized);
  if (!chol) {
    throw SingularHessian("coefficient_variances: Hessian is singular "
                          "(rank-deficient design with lambda = 0)");
  }

  VarianceReport report;
  report.v = inverse_diagonal(*chol);
  report.sum_v = 0.0;
  for (const double v : report.v) report.sum_v += v;

  // rank of the unregularized design from its clamped spectrum
  const DenseMatrix unregularized = intercept ? augmented_hessian(x, 0.0, true, dense_cap)
                                              : plain_hessian(x, 0.0, dense_cap);
  const Spectrum spectrum = eigen_spectrum(unregularized, dense_cap);
  report.rank = spectrum.rank();

  if (x.rows() <= report.rank) {
    throw DegenerateOutcome("coefficient_variances: no residual degrees of freedom (n = " +
                            std::to_string(x.rows()) + ", rank = " +
                            std::to_string(report.rank) + ")");
  }
  const auto y_hat = predict(fit, x);
  double sse = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sse += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
  report.sigma2_hat = sse / static_cast<double>(x.rows() - report.rank);
  return report;
}

double effective_dimension(std::span<const double> eigenvalues, double lambda) {
  if (lambda < 0.0) throw ConfigError("effective_dimension: lambda must be non-negative");
  double rho = 0.0;
  for (const double s : eigenvalues) {
    if (s < 0.0) throw DegenerateSpectrum("effective_dimension: negative eigenvalue");
    if (s == 0.0 && lambda == 0.0) {
      throw DegenerateSpectrum("effective_dimension: zero eigenvalue with lambda = 0");
    }
    if (s > 0.0) rho += s / (s + lambda);
  }
  return rho;
}

double effective_dimension_bound(std::size_t p_plus_1, double mean_eig, double lambda,
                                 std::size_t n_train) {
  if (!(mean_eig > 0.0)) throw ConfigError("effective_dimension_bound: mean_eig must be > 0");
  if (n_train < 1) throw ConfigError("effective_dimension_bound: n_train must be >= 1");
  if (lambda < 0.0) throw ConfigError("effective_dimension_bound: lambda must be >= 0");
  return static_cast<double>(p_plus_1) * mean_eig /
         (mean_eig + lambda / static_cast<double>(n_train));
}

void write_coefficients_csv(const FitResult& fit, const CodeVocabulary& vocab,
                            std::ostream& out) {
  if (fit.coefficients.size() != vocab.size()) {
    throw ShapeMismatch("write_coefficients_csv: vocabulary/coefficient mismatch");
  }
  out << "# granreg-csv v1 coefficients\n";
  out << "code,beta\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", fit.intercept);
  out << "__intercept__," << buf << '\n';
  for (std::size_t j = 0; j < vocab.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", fit.coefficients[j]);
    out << vocab.code(j) << ',' << buf << '\n';
  }
}

void write_fit_metadata_json(const FitResult& fit, double train_r2, double test_r2,
                             std::ostream& out) {
  nlohmann::json j;
  j["lambda"] = fit.config.lambda;
  j["penalize_intercept"] = fit.config.penalize_intercept;
  j["intercept_enabled"] = fit.config.intercept;
  j["tolerance"] = fit.config.tolerance;
  j["iterations"] = fit.iterations;
  j["relative_residual"] = fit.relative_residual;
  j["converged"] = fit.converged;
  j["train_r2"] = train_r2;
  j["test_r2"] = test_r2;
  out << j.dump(2) << '\n';
}

}  // namespace granreg
