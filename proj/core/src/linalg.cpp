#include "granreg/linalg.hpp"

#include <cmath>

#include "granreg/errors.hpp"

namespace granreg {

double DenseMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += at(i, i);
  return t;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (const double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double DenseMatrix::symmetry_error() const {
  double m = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i + 1; j < dim_; ++j) {
      m = std::max(m, std::abs(at(i, j) - at(j, i)));
    }
  }
  return m;
}

DenseMatrix augmented_hessian(const SparseDesignMatrix& matrix, double lambda,
                              bool penalize_intercept, std::size_t dense_cap) {
  const std::size_t p = matrix.cols();
  if (p + 1 > dense_cap) {
    throw CapExceeded("augmented Hessian dimension " + std::to_string(p + 1) +
                      " exceeds dense cap " + std::to_string(dense_cap));
  }
  const auto summary = hessian_summary(matrix, dense_cap);

  DenseMatrix a(p + 1);
  const auto& gram = summary.dense_gram();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      a.at(i, j) = static_cast<double>(gram[i * p + j]);
    }
  }
  // border blocks X'1 and 1'X are the column value-sums
  std::vector<std::int64_t> col_sums(p, 0);
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    for (const auto& e : matrix.row(i)) col_sums[e.col] += e.value;
  }
  for (std::size_t j = 0; j < p; ++j) {
    a.at(j, p) = static_cast<double>(col_sums[j]);
    a.at(p, j) = static_cast<double>(col_sums[j]);
  }
  a.at(p, p) = static_cast<double>(matrix.rows());

  if (lambda > 0.0) {
    for (std::size_t j = 0; j < p; ++j) a.at(j, j) += lambda;
    if (penalize_intercept) a.at(p, p) += lambda;
  }
  return a;
}

DenseMatrix plain_hessian(const SparseDesignMatrix& matrix, double lambda,
                          std::size_t dense_cap) {
  const std::size_t p = matrix.cols();
  if (p > dense_cap) {
    throw CapExceeded("plain Hessian dimension " + std::to_string(p) +
                      " exceeds dense cap " + std::to_string(dense_cap));
  }
  const auto summary = hessian_summary(matrix, dense_cap);
  DenseMatrix a(p);
  const auto& gram = summary.dense_gram();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      a.at(i, j) = static_cast<double>(gram[i * p + j]);
    }
    if (lambda > 0.0) a.at(i, i) += lambda;
  }
  return a;
}

std::optional<CholeskyFactor> cholesky(const DenseMatrix& a) {
  const std::size_t n = a.dim();
  CholeskyFactor f;
  f.dim = n;
  f.lower.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a.at(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= f.lower[i * n + k] * f.lower[j * n + k];
      if (i == j) {
        if (!(sum > 0.0)) return std::nullopt;  // not positive definite
        f.lower[i * n + i] = std::sqrt(sum);
      } else {
        f.lower[i * n + j] = sum / f.lower[j * n + j];
      }
    }
  }
  return f;
}

std::vector<double> cholesky_solve(const CholeskyFactor& chol, std::span<const double> b) {
  const std::size_t n = chol.dim;
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {  // forward: L y = b
    double sum = x[i];
    for (std::size_t k = 0; k < i; ++k) sum -= chol.lower[i * n + k] * x[k];
    x[i] = sum / chol.lower[i * n + i];
  }
  for (std::size_t ii = n; ii > 0; --ii) {  // backward: L' x = y
    const std::size_t i = ii - 1;
    double sum = x[i];
    for (std::size_t k = i + 1; k < n; ++k) sum -= chol.lower[k * n + i] * x[k];
    x[i] = sum / chol.lower[i * n + i];
  }
  return x;
}

std::vector<double> inverse_diagonal(const CholeskyFactor& chol) {
  const std::size_t n = chol.dim;
  std::vector<double> diag(n, 0.0);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    // w = L^{-1} e_i; zero before index i
    for (std::size_t r = i; r < n; ++r) {
      double sum = (r == i) ? 1.0 : 0.0;
      for (std::size_t k = i; k < r; ++k) sum -= chol.lower[r * n + k] * w[k];
      w[r] = sum / chol.lower[r * n + r];
    }
    double acc = 0.0;
    for (std::size_t r = i; r < n; ++r) acc += w[r] * w[r];
    diag[i] = acc;
  }
  return diag;
}

}  // namespace granreg
