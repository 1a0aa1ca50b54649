#include "dirtybench/linalg.hpp"

#include <cmath>

#include "dirtybench/error.hpp"

namespace dirtybench {

bool cholesky(Matrix& a, double min_pivot) {
  const std::size_t n = a.rows;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > min_pivot)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
    for (std::size_t i = 0; i < j; ++i) a(i, j) = 0.0;
  }
  return true;
}

std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
  const std::size_t n = l.rows;
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * z[k];
    z[i] = s / l(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = z[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

LinearFit solve_linear(const Matrix& x, std::span<const double> y, bool allow_ridge) {
  const std::size_t n = x.rows;
  const std::size_t p = x.cols + 1;
  if (n == 0) throw Error(ErrorCode::empty_input, "no rows to fit");
  if (y.size() != n) throw Error(ErrorCode::parameter, "target length does not match the design");

  // Design with a leading intercept column, equilibrated to unit column norm.
  auto at = [&](std::size_t i, std::size_t j) { return j == 0 ? 1.0 : x(i, j - 1); };
  std::vector<double> scale(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += at(i, j) * at(i, j);
    scale[j] = s > 0.0 ? 1.0 / std::sqrt(s) : 1.0;
  }
  Matrix gram(p, p);
  std::vector<double> rhs(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      const double va = at(i, a) * scale[a];
      rhs[a] += va * y[i];
      for (std::size_t b = 0; b <= a; ++b) gram(a, b) += va * at(i, b) * scale[b];
    }
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) gram(a, b) = gram(b, a);
  }

  LinearFit fit;
  Matrix l = gram;
  constexpr double kMinPivot = 1e-13;
  if (!cholesky(l, kMinPivot)) {
    if (!allow_ridge) throw Error(ErrorCode::singularity, "normal equations are singular");
    l = gram;
    for (std::size_t a = 0; a < p; ++a) l(a, a) += 1e-8;
    if (!cholesky(l, 0.0)) throw Error(ErrorCode::singularity, "normal equations are singular even with ridge damping");
    fit.ridge = true;
  }
  const auto beta = cholesky_solve(l, rhs);
  fit.bias = beta[0] * scale[0];
  fit.weights.resize(p - 1);
  for (std::size_t j = 1; j < p; ++j) fit.weights[j - 1] = beta[j] * scale[j];
  return fit;
}

double sum_squared_error(const Matrix& x, std::span<const double> y, const LinearFit& fit) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double f = fit.bias;
    for (std::size_t j = 0; j < x.cols; ++j) f += fit.weights[j] * x(i, j);
    const double r = y[i] - f;
    s += r * r;
  }
  return s;
}

}  // namespace dirtybench
