#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dirtybench/dataset.hpp"
#include "dirtybench/linalg.hpp"

namespace dirtybench {

enum class RegressionKind { linear, polynomial, stepwise };

std::string_view to_string(RegressionKind kind) noexcept;

/// f(x) = b + sum_k sum_{p=1..degree} w[k*degree + p-1] * x_{columns[k]}^p
struct RegressionModel {
  RegressionKind kind = RegressionKind::linear;
  /// Dataset column indices the model reads.
  std::vector<std::size_t> columns;
  int degree = 1;
  std::vector<double> weights;
  double bias = 0.0;
  bool ridge_fallback = false;

  /// Throws a schema error on arity mismatch and a type error on Missing.
  double predict(const Record& query) const;
};

/// Numeric feature columns; categorical features are not used for regression.
std::vector<std::size_t> regression_columns(const Schema& schema);

/// Design matrix of the given columns raised to powers 1..degree.
Matrix design_matrix(const Dataset& d, std::span<const std::size_t> columns, int degree = 1);

RegressionModel fit_least_squares(const Dataset& train, bool allow_ridge = true);

struct MleOptions {
  std::size_t max_iterations = 20000;
  /// Stop once the relative log-likelihood gain of a step drops below this.
  double tolerance = 1e-14;
};

struct MleResult {
  RegressionModel model;
  /// Log-likelihood before the first step and after every step.
  std::vector<double> log_likelihood_trace;
  double sigma2 = 0.0;
};

/// Gaussian-residual log-likelihood with the variance profiled out:
/// -n/2 (log(2 pi sigma^2) + 1), sigma^2 = SSE/n (floored to stay finite).
double profile_log_likelihood(double sse, std::size_t n);

MleResult fit_maximum_likelihood(const Dataset& train, const MleOptions& options = {});

RegressionModel fit_polynomial(const Dataset& train, int degree = 3, bool allow_ridge = true);

struct StepwiseOptions {
  double alpha_in = 0.05;
  double alpha_out = 0.10;
};

/// p-value of the partial F-test for one added column: the model with
/// `params_full` parameters (intercept included) against the reduced one.
double partial_f_pvalue(double sse_reduced, double sse_full, std::size_t n, std::size_t params_full, double sst);

RegressionModel fit_stepwise(const Dataset& train, const StepwiseOptions& options = {});

double rmsd(std::span<const double> predicted, std::span<const double> truth);

}  // namespace dirtybench
