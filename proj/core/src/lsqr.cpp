#include "granreg/lsqr.hpp"

#include <algorithm>
#include <cmath>

#include "granreg/errors.hpp"

namespace granreg {

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (const double x : v) acc += x * x;
  return std::sqrt(acc);
}

void scale(std::span<double> v, double s) {
  for (double& x : v) x *= s;
}

}  // namespace

LsqrResult lsqr_solve(const LinearOperator& op, std::span<const double> b,
                      const LsqrOptions& options) {
  const std::size_t m = op.rows();
  const std::size_t n = op.cols();
  if (b.size() != m) throw ShapeMismatch("lsqr: rhs length does not match operator rows");

  LsqrResult result;
  result.x.assign(n, 0.0);

  std::vector<double> u(b.begin(), b.end());
  const double bnorm = norm2(u);
  if (bnorm == 0.0) {
    result.converged = true;
    result.relative_residual = 0.0;
    return result;
  }

  // Golub-Kahan bidiagonalization start
  double beta = bnorm;
  scale(u, 1.0 / beta);
  std::vector<double> v(n, 0.0);
  op.apply_transpose(u, v);
  double alpha = norm2(v);
  if (alpha == 0.0) {
    // b is orthogonal to range(A): x = 0 is the least-squares solution
    result.converged = true;
    result.relative_residual = 0.0;
    return result;
  }
  scale(v, 1.0 / alpha);

  std::vector<double> w = v;
  std::vector<double> tmp_m(m), tmp_n(n);

  double phibar = beta;
  double rhobar = alpha;
  double anorm2 = alpha * alpha;  // running Frobenius estimate of ||A||^2

  const double tol = options.tolerance;
  double test1 = 1.0, test2 = 1.0;

  for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
    result.iterations = iter;

    // continue the bidiagonalization: beta u = A v - alpha u
    op.apply(v, tmp_m);
    for (std::size_t i = 0; i < m; ++i) u[i] = tmp_m[i] - alpha * u[i];
    beta = norm2(u);
    if (beta > 0.0) {
      scale(u, 1.0 / beta);
      // alpha v = A' u - beta v
      op.apply_transpose(u, tmp_n);
      for (std::size_t j = 0; j < n; ++j) v[j] = tmp_n[j] - beta * v[j];
      alpha = norm2(v);
      if (alpha > 0.0) scale(v, 1.0 / alpha);
    } else {
      alpha = 0.0;
    }
    anorm2 += alpha * alpha + beta * beta;

    // plane rotation eliminating the subdiagonal element
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    for (std::size_t j = 0; j < n; ++j) {
      result.x[j] += t1 * w[j];
      w[j] = v[j] + t2 * w[j];
    }

    // stopping measures: ||r|| = phibar, ||A'r|| = phibar * alpha * |c|
    const double rnorm = phibar;
    const double arnorm = phibar * alpha * std::abs(c);
    const double anorm = std::sqrt(anorm2);
    test1 = rnorm / bnorm;
    test2 = (anorm > 0.0 && rnorm > 0.0) ? arnorm / (anorm * rnorm) : 0.0;

    if (test1 <= tol || test2 <= tol) {
      result.converged = true;
      break;
    }
    if (beta == 0.0 || alpha == 0.0) {
      // exact breakdown: the Krylov space is exhausted, solution reached
      result.converged = true;
      break;
    }
  }

  result.relative_residual = std::min(test1, test2);
  if (result.relative_residual <= tol) result.converged = true;
  return result;
}

}  // namespace granreg
