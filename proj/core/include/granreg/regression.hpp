#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "granreg/design_matrix.hpp"

namespace granreg {

struct FitConfig {
  double lambda = 0.0;            // 0 => OLS
  bool penalize_intercept = true; // lambda I_{p+1} convention
  bool intercept = true;          // augment X with a ones column
  double tolerance = 1e-10;       // relative residual threshold
  std::size_t max_iterations = 0; // 0 => 10 * (p + 1)
};

/// Fitted coefficients plus solver diagnostics and the configuration that
/// produced them.
struct FitResult {
  double intercept = 0.0;
  std::vector<double> coefficients;  // aligned to the vocabulary columns
  FitConfig config;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;

  double lambda() const { return config.lambda; }
};

/// Minimizes sum (y_i - yhat_i)^2 + lambda ||beta||^2 over the augmented
/// matrix X~ = [X, 1] with a matvec-driven iterative solver. For lambda = 0
/// on rank-deficient designs the result is the minimum-norm least-squares
/// solution. Deterministic given inputs. Non-convergence is reported via
/// converged = false on the best iterate, not thrown.
FitResult fit(const SparseDesignMatrix& x, std::span<const double> y, const FitConfig& config);

/// yhat_i = beta0 + sum_j beta_j X_ij. Throws ShapeMismatch when columns
/// and coefficients disagree.
std::vector<double> predict(const FitResult& fit, const SparseDesignMatrix& x);

/// 1 - SSE/SST with SST about the mean of y. Throws DegenerateOutcome when
/// y is constant, ShapeMismatch on length mismatch or fewer than 2 points.
double r2_score(std::span<const double> y, std::span<const double> y_hat);

struct VarianceReport {
  double sigma2_hat = 0.0;        // SSE / (n - rank)
  std::vector<double> v;          // diagonal of the (regularized) inverse Hessian
  double sum_v = 0.0;             // S_V
  std::size_t rank = 0;           // rank of the unregularized augmented Hessian
};

/// Per-coefficient variance factors v_i from the dense inverse of the
/// augmented Hessian (plus lambda on the penalized diagonal when the fit
/// was regularized). Desk-scale: throws CapExceeded above dense_cap and
/// SingularHessian when the matrix is not positive definite.
VarianceReport coefficient_variances(const SparseDesignMatrix& x, std::span<const double> y,
                                     const FitResult& fit,
                                     std::size_t dense_cap = HessianSummary::kDefaultDenseCap);

/// rho = sum_i s_i / (s_i + lambda) over a Hessian spectrum. Throws
/// DegenerateSpectrum when lambda = 0 and some eigenvalue is zero.
double effective_dimension(std::span<const double> eigenvalues, double lambda);

/// Jensen upper bound rho_B = (p+1) sbar / (sbar + lambda/n) where sbar is
/// the mean eigenvalue of the n-scaled augmented Hessian X~'X~ / n.
double effective_dimension_bound(std::size_t p_plus_1, double mean_eig, double lambda,
                                 std::size_t n_train);

/// CSV export `code,beta` with the intercept as row `__intercept__`.
void write_coefficients_csv(const FitResult& fit, const CodeVocabulary& vocab,
                            std::ostream& out);

/// JSON sidecar with lambda, iterations, residual, and R^2 values.
void write_fit_metadata_json(const FitResult& fit, double train_r2, double test_r2,
                             std::ostream& out);

}  // namespace granreg
