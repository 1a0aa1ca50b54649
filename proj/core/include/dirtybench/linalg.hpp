#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dirtybench {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// In-place Cholesky factorization of a symmetric matrix into its lower
/// factor. Returns false when a pivot is not above `min_pivot`.
bool cholesky(Matrix& a, double min_pivot);

/// Solves L L^T x = b for a lower factor L.
std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b);

struct LinearFit {
  std::vector<double> weights;
  double bias = 0.0;
  /// Set when the normal equations were singular and a 1e-8 ridge term was added.
  bool ridge = false;
};

/// Ordinary least squares with intercept over the n x p design `x`.
/// Normal equations are column-equilibrated and Cholesky-factored; a
/// singular system throws a singularity error unless `allow_ridge`.
LinearFit solve_linear(const Matrix& x, std::span<const double> y, bool allow_ridge = true);

double sum_squared_error(const Matrix& x, std::span<const double> y, const LinearFit& fit);

}  // namespace dirtybench
