#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace granreg {

/// Abstract m x n operator exposing the two matvecs LSQR needs.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  /// y = A x
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  /// out = A' y
  virtual void apply_transpose(std::span<const double> y, std::span<double> out) const = 0;
};

struct LsqrOptions {
  double tolerance = 1e-10;      // used as both atol and btol
  std::size_t max_iterations = 100;
};

struct LsqrResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  /// min(||r|| / ||b||, ||A'r|| / (||A|| ||r||)); the relevant measure is
  /// the first for compatible systems and the second for least-squares.
  double relative_residual = 0.0;
  bool converged = false;
};

/// Paige-Saunders LSQR for min ||A x - b||_2. Started from x = 0, so for
/// rank-deficient systems the iterates stay in range(A') and the limit is
/// the minimum-norm least-squares solution. Damped problems are expressed
/// by stacking penalty rows into the operator.
LsqrResult lsqr_solve(const LinearOperator& op, std::span<const double> b,
                      const LsqrOptions& options);

}  // namespace granreg
