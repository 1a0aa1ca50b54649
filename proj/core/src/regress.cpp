#include "dirtybench/regress.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/fisher_f.hpp>

#include "dirtybench/error.hpp"
#include "dirtybench/features.hpp"

namespace dirtybench {

std::string_view to_string(RegressionKind kind) noexcept {
  switch (kind) {
    case RegressionKind::linear: return "linear";
    case RegressionKind::polynomial: return "polynomial";
    case RegressionKind::stepwise: return "stepwise";
  }
  return "linear";
}

double RegressionModel::predict(const Record& query) const {
  double f = bias;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] >= query.cells.size()) throw Error(ErrorCode::schema, "query record is too short");
    const auto* v = std::get_if<double>(&query.cells[columns[k]]);
    if (!v) throw Error(ErrorCode::type, "regression needs numeric, imputed features");
    double power = 1.0;
    for (int p = 0; p < degree; ++p) {
      power *= *v;
      f += weights[k * static_cast<std::size_t>(degree) + static_cast<std::size_t>(p)] * power;
    }
  }
  return f;
}

std::vector<std::size_t> regression_columns(const Schema& schema) {
  std::vector<std::size_t> out;
  for (std::size_t c : schema.feature_indices()) {
    if (schema.column(c).kind == ColumnKind::numeric) out.push_back(c);
  }
  return out;
}

Matrix design_matrix(const Dataset& d, std::span<const std::size_t> columns, int degree) {
  if (degree < 1) throw Error(ErrorCode::parameter, "polynomial degree must be at least 1");
  const auto deg = static_cast<std::size_t>(degree);
  Matrix x(d.size(), columns.size() * deg);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const auto* v = std::get_if<double>(&d.row(i).cells[columns[k]]);
      if (!v) {
        throw Error(ErrorCode::type, "missing value in '" + d.schema().column(columns[k]).name + "'; impute first");
      }
      double power = 1.0;
      for (std::size_t p = 0; p < deg; ++p) {
        power *= *v;
        x(i, k * deg + p) = power;
      }
    }
  }
  return x;
}

namespace {

RegressionModel fit_columns(const Dataset& train, std::vector<std::size_t> columns, int degree, bool allow_ridge,
                            RegressionKind kind) {
  if (train.size() == 0) throw Error(ErrorCode::empty_input, "training set is empty");
  const auto y = numeric_targets(train);
  const Matrix x = design_matrix(train, columns, degree);
  const LinearFit fit = solve_linear(x, y, allow_ridge);
  RegressionModel m;
  m.kind = kind;
  m.columns = std::move(columns);
  m.degree = degree;
  m.weights = fit.weights;
  m.bias = fit.bias;
  m.ridge_fallback = fit.ridge;
  return m;
}

}  // namespace

RegressionModel fit_least_squares(const Dataset& train, bool allow_ridge) {
  return fit_columns(train, regression_columns(train.schema()), 1, allow_ridge, RegressionKind::linear);
}

RegressionModel fit_polynomial(const Dataset& train, int degree, bool allow_ridge) {
  return fit_columns(train, regression_columns(train.schema()), degree, allow_ridge, RegressionKind::polynomial);
}

double profile_log_likelihood(double sse, std::size_t n) {
  const double m = static_cast<double>(n);
  const double sigma2 = std::max(sse / m, 1e-300);
  return -m / 2.0 * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
}

MleResult fit_maximum_likelihood(const Dataset& train, const MleOptions& options) {
  if (train.size() == 0) throw Error(ErrorCode::empty_input, "training set is empty");
  const auto y = numeric_targets(train);
  const auto columns = regression_columns(train.schema());
  const Matrix raw = design_matrix(train, columns, 1);
  const std::size_t n = raw.rows;
  const std::size_t p = raw.cols;

  std::vector<double> mean(p, 0.0);
  std::vector<double> sd(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) mean[j] += raw(i, j);
    mean[j] /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (raw(i, j) - mean[j]) * (raw(i, j) - mean[j]);
    v /= static_cast<double>(n);
    sd[j] = v > 0.0 ? std::sqrt(v) : 1.0;
  }
  Matrix z(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) z(i, j) = (raw(i, j) - mean[j]) / sd[j];
  }

  std::vector<double> w(p, 0.0);
  double b = 0.0;
  for (double v : y) b += v;
  b /= static_cast<double>(n);

  std::vector<double> r(n);
  auto residuals = [&] {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double f = b;
      for (std::size_t j = 0; j < p; ++j) f += w[j] * z(i, j);
      r[i] = y[i] - f;
      sse += r[i] * r[i];
    }
    return sse;
  };

  MleResult out;
  double sse = residuals();
  double ll = profile_log_likelihood(sse, n);
  out.log_likelihood_trace.push_back(ll);
  // Standardized columns bound the Hessian of SSE/2n by p+1, so this step
  // size decreases SSE (and raises the likelihood) on every iteration.
  const double step = 1.0 / static_cast<double>(p + 1);
  std::vector<double> grad(p);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const double sigma2 = std::max(sse / static_cast<double>(n), 1e-300);
    // d ll / d theta = X^T r / sigma2; ascend along it scaled by sigma2 / n.
    double grad_b = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      grad_b += r[i] / sigma2;
      for (std::size_t j = 0; j < p; ++j) grad[j] += r[i] * z(i, j) / sigma2;
    }
    const double scale = step * sigma2 / static_cast<double>(n);
    b += scale * grad_b;
    for (std::size_t j = 0; j < p; ++j) w[j] += scale * grad[j];
    sse = residuals();
    const double next = profile_log_likelihood(sse, n);
    if (!std::isfinite(next)) throw Error(ErrorCode::divergence, "log-likelihood became non-finite");
    const double gain = next - ll;
    ll = next;
    out.log_likelihood_trace.push_back(ll);
    if (gain <= options.tolerance * std::max(1.0, std::abs(ll))) break;
  }

  RegressionModel& m = out.model;
  m.kind = RegressionKind::linear;
  m.columns = columns;
  m.degree = 1;
  m.weights.resize(p);
  m.bias = b;
  for (std::size_t j = 0; j < p; ++j) {
    m.weights[j] = w[j] / sd[j];
    m.bias -= m.weights[j] * mean[j];
  }
  out.sigma2 = sse / static_cast<double>(n);
  return out;
}

double partial_f_pvalue(double sse_reduced, double sse_full, std::size_t n, std::size_t params_full, double sst) {
  if (n <= params_full) return 1.0;
  const double tiny = 1e-12 * std::max(sst, 1e-300);
  const double reduction = sse_reduced - sse_full;
  if (reduction <= tiny) return 1.0;
  if (sse_full <= tiny) return 0.0;
  const double df2 = static_cast<double>(n - params_full);
  const double f = reduction / (sse_full / df2);
  boost::math::fisher_f dist(1.0, df2);
  return boost::math::cdf(boost::math::complement(dist, f));
}

RegressionModel fit_stepwise(const Dataset& train, const StepwiseOptions& options) {
  if (!(options.alpha_in > 0.0 && options.alpha_in <= options.alpha_out && options.alpha_out < 1.0)) {
    throw Error(ErrorCode::parameter, "need 0 < alpha_in <= alpha_out < 1");
  }
  if (train.size() == 0) throw Error(ErrorCode::empty_input, "training set is empty");
  const auto y = numeric_targets(train);
  const auto candidates = regression_columns(train.schema());
  const std::size_t n = train.size();

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double sst = 0.0;
  for (double v : y) sst += (v - mean) * (v - mean);

  auto sse_of = [&](const std::vector<std::size_t>& cols) {
    const Matrix x = design_matrix(train, cols, 1);
    return sum_squared_error(x, y, solve_linear(x, y, true));
  };

  std::vector<std::size_t> selected;
  double current = sst;
  for (std::size_t round = 0; round < 4 * candidates.size() + 4; ++round) {
    bool changed = false;
    // Forward: most significant column not yet selected.
    double best_p = 1.0;
    std::size_t best_col = 0;
    double best_sse = current;
    bool found = false;
    for (std::size_t c : candidates) {
      if (std::find(selected.begin(), selected.end(), c) != selected.end()) continue;
      auto trial = selected;
      trial.push_back(c);
      const double s = sse_of(trial);
      const double pv = partial_f_pvalue(current, s, n, trial.size() + 1, sst);
      if (!found || pv < best_p) {
        best_p = pv;
        best_col = c;
        best_sse = s;
        found = true;
      }
    }
    if (found && best_p < options.alpha_in) {
      selected.push_back(best_col);
      current = best_sse;
      changed = true;
    }
    // Backward: least significant selected column.
    if (selected.size() > 1 || (changed && selected.size() == 1)) {
      double worst_p = -1.0;
      std::size_t worst = 0;
      double worst_sse = current;
      for (std::size_t k = 0; k < selected.size(); ++k) {
        auto trial = selected;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
        const double s = trial.empty() ? sst : sse_of(trial);
        const double pv = partial_f_pvalue(s, current, n, selected.size() + 1, sst);
        if (pv > worst_p) {
          worst_p = pv;
          worst = k;
          worst_sse = s;
        }
      }
      if (worst_p > options.alpha_out) {
        selected.erase(selected.begin() + static_cast<std::ptrdiff_t>(worst));
        current = worst_sse;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::sort(selected.begin(), selected.end());
  return fit_columns(train, selected, 1, true, RegressionKind::stepwise);
}

double rmsd(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::parameter, "prediction count does not match truth");
  if (predicted.empty()) throw Error(ErrorCode::empty_input, "no predictions");
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - truth[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(predicted.size()));
}

}  // namespace dirtybench
