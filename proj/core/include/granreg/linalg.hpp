#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "granreg/design_matrix.hpp"

namespace granreg {

/// Dense square matrix, row-major. Desk-scale only; used for Hessians and
/// their factorizations.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

  std::size_t dim() const { return dim_; }
  double& at(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double trace() const;
  double max_abs() const;
  /// max_ij |a_ij - a_ji|
  double symmetry_error() const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// The augmented Hessian X~'X~ (+ lambda on the penalized diagonal), with the
/// intercept as the last row/column:
///   [ X'X   X'1 ]
///   [ 1'X    n  ]
/// Entries come from the exact integer Gram, so the result is exact for
/// desk-scale matrices. Throws CapExceeded when p + 1 > dense_cap.
DenseMatrix augmented_hessian(const SparseDesignMatrix& matrix, double lambda,
                              bool penalize_intercept,
                              std::size_t dense_cap = HessianSummary::kDefaultDenseCap);

/// X'X + lambda I without the intercept border, for intercept-free fits.
DenseMatrix plain_hessian(const SparseDesignMatrix& matrix, double lambda,
                          std::size_t dense_cap = HessianSummary::kDefaultDenseCap);

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
struct CholeskyFactor {
  std::size_t dim = 0;
  std::vector<double> lower;  // row-major, upper part unused

  double at(std::size_t i, std::size_t j) const { return lower[i * dim + j]; }
};

/// Returns nullopt when the matrix is not (numerically) positive definite.
std::optional<CholeskyFactor> cholesky(const DenseMatrix& a);

/// Solves A x = b given A = L L'.
std::vector<double> cholesky_solve(const CholeskyFactor& chol, std::span<const double> b);

/// Diagonal of A^{-1} given A = L L': diag_i = || L^{-1} e_i ||^2.
std::vector<double> inverse_diagonal(const CholeskyFactor& chol);

}  // namespace granreg
