#include <algorithm>
#include <cmath>

#include "dirtybench/classify.hpp"
#include "dirtybench/error.hpp"

namespace dirtybench {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double linear(std::span<const double> x, std::span<const double> w, double b) {
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
  return z;
}

/// log(sigmoid(z)) without overflow.
double log_sigmoid(double z) { return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

void check_shapes(const Points& x, std::span<const int> y, std::span<const double> w) {
  if (x.size() != y.size()) throw Error(ErrorCode::parameter, "label count does not match the point count");
  if (x.dim != w.size()) throw Error(ErrorCode::parameter, "weight count does not match the dimension");
  if (y.empty()) throw Error(ErrorCode::empty_input, "no training points");
}

}  // namespace

double logistic_log_likelihood(const Points& x, std::span<const int> y, std::span<const double> w, double b) {
  check_shapes(x, y, w);
  double ll = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double z = linear(x.row(i), w, b);
    ll += y[i] == 1 ? log_sigmoid(z) : log_sigmoid(-z);
  }
  return ll / static_cast<double>(y.size());
}

void logistic_gradient(const Points& x, std::span<const int> y, std::span<const double> w, double b,
                       std::span<double> grad_w, double& grad_b) {
  check_shapes(x, y, w);
  if (grad_w.size() != w.size()) throw Error(ErrorCode::parameter, "gradient buffer has the wrong size");
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto xi = x.row(i);
    const double r = static_cast<double>(y[i]) - sigmoid(linear(xi, w, b));
    for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] += r * xi[j];
    grad_b += r;
  }
  const double n = static_cast<double>(y.size());
  for (double& g : grad_w) g /= n;
  grad_b /= n;
}

LogisticModel train_logistic(const Dataset& train, const LogisticOptions& options) {
  if (train.size() == 0) throw Error(ErrorCode::empty_input, "training set is empty");
  if (!(options.learning_rate > 0.0)) throw Error(ErrorCode::parameter, "learning rate must be positive");
  if (train.schema().class_count() > 2) {
    throw Error(ErrorCode::unsupported, "logistic regression needs a binary target; got " +
                                            std::to_string(train.schema().class_count()) + " classes");
  }
  const auto y = class_labels(train);
  LogisticModel m;
  m.encoder_ = FeatureEncoder::fit(train);
  const Points x = m.encoder_.encode_all(train);
  m.weights_.assign(x.dim, 0.0);
  m.bias_ = 0.0;
  std::vector<double> gw(x.dim);
  double gb = 0.0;
  for (std::size_t it = 0; it < options.iterations; ++it) {
    logistic_gradient(x, y, m.weights_, m.bias_, gw, gb);
    for (std::size_t j = 0; j < gw.size(); ++j) m.weights_[j] += options.learning_rate * gw[j];
    m.bias_ += options.learning_rate * gb;
    if (!std::isfinite(m.bias_)) throw Error(ErrorCode::divergence, "logistic regression diverged");
  }
  for (double w : m.weights_) {
    if (!std::isfinite(w)) throw Error(ErrorCode::divergence, "logistic regression diverged");
  }
  return m;
}

double LogisticModel::probability(const Record& query) const {
  const auto x = encoder_.encode(query);
  return sigmoid(linear(x, weights_, bias_));
}

int LogisticModel::predict(const Record& query) const { return probability(query) >= 0.5 ? 1 : 0; }

int logistic_classify(const LogisticModel& model, const Record& query) { return model.predict(query); }

}  // namespace dirtybench
