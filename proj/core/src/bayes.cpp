#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "dirtybench/classify.hpp"
#include "dirtybench/error.hpp"

namespace dirtybench {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> normalize_log2(const std::vector<double>& scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> p(scores.size(), 0.0);
  if (top == kNegInf) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    p[j] = std::exp2(scores[j] - top);
    sum += p[j];
  }
  for (double& v : p) v /= sum;
  return p;
}

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

double safe_log2(double p) { return p > 0.0 ? std::log2(p) : kNegInf; }

}  // namespace

// ---------------------------------------------------------------------------
// Naive Bayes

NaiveBayes train_naive_bayes(const Dataset& train, double smoothing, std::size_t numeric_bins) {
  if (train.size() == 0) throw Error(ErrorCode::empty_input, "training set is empty");
  if (!(smoothing >= 0.0)) throw Error(ErrorCode::parameter, "smoothing must be non-negative");
  const auto labels = class_labels(train);
  const std::size_t nc = train.schema().class_count();

  NaiveBayes m;
  m.discretizer_ = Discretizer::fit(train, numeric_bins);
  const auto& card = m.discretizer_.cardinalities();
  const std::size_t nf = card.size();

  std::vector<std::size_t> class_counts(nc, 0);
  std::vector<std::vector<std::vector<std::size_t>>> counts(nf);
  for (std::size_t f = 0; f < nf; ++f) counts[f].assign(nc, std::vector<std::size_t>(card[f], 0));
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto codes = m.discretizer_.encode(train.row(i));
    const auto y = static_cast<std::size_t>(labels[i]);
    ++class_counts[y];
    for (std::size_t f = 0; f < nf; ++f) ++counts[f][y][static_cast<std::size_t>(codes[f])];
  }

  const double n = static_cast<double>(train.size());
  m.priors_.resize(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    const double denom = n + smoothing * static_cast<double>(nc);
    m.priors_[j] = denom > 0.0 ? (static_cast<double>(class_counts[j]) + smoothing) / denom : 0.0;
  }
  m.conditionals_.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    m.conditionals_[f].assign(nc, std::vector<double>(card[f], 0.0));
    for (std::size_t j = 0; j < nc; ++j) {
      const double denom = static_cast<double>(class_counts[j]) + smoothing * static_cast<double>(card[f]);
      for (std::size_t v = 0; v < card[f]; ++v) {
        m.conditionals_[f][j][v] = denom > 0.0 ? (static_cast<double>(counts[f][j][v]) + smoothing) / denom : 0.0;
      }
    }
  }
  return m;
}

std::vector<double> NaiveBayes::log_scores(const Record& query) const {
  if (priors_.empty()) throw Error(ErrorCode::configuration, "naive Bayes model is not trained");
  const auto codes = discretizer_.encode(query);
  std::vector<double> scores(priors_.size());
  for (std::size_t j = 0; j < priors_.size(); ++j) {
    double s = safe_log2(priors_[j]);
    for (std::size_t f = 0; f < codes.size(); ++f) s += safe_log2(conditionals_[f][j][static_cast<std::size_t>(codes[f])]);
    scores[j] = s;
  }
  return scores;
}

std::vector<double> NaiveBayes::posterior(const Record& query) const { return normalize_log2(log_scores(query)); }

int NaiveBayes::predict(const Record& query) const { return argmax(log_scores(query)); }

int nb_classify(const NaiveBayes& model, const Record& query) { return model.predict(query); }

// ---------------------------------------------------------------------------
// Bayesian network

std::size_t NetworkStructure::edge_count() const {
  std::size_t n = 0;
  for (const auto& p : parents) n += p.size();
  return n;
}

DiscreteTable discretize_for_network(const Dataset& train, std::size_t numeric_bins) {
  const auto labels = class_labels(train);
  const auto disc = Discretizer::fit(train, numeric_bins);
  DiscreteTable t;
  t.cardinalities = disc.cardinalities();
  t.cardinalities.push_back(train.schema().class_count());
  t.rows.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto codes = disc.encode(train.row(i));
    codes.push_back(labels[i]);
    t.rows.push_back(std::move(codes));
  }
  return t;
}

namespace {

/// Joint counts N(parent config, value) for one family.
std::unordered_map<std::size_t, std::vector<std::size_t>> family_counts(const DiscreteTable& t, std::size_t v,
                                                                        const std::vector<int>& parents) {
  std::unordered_map<std::size_t, std::vector<std::size_t>> counts;
  const std::size_t r = t.cardinalities[v];
  for (const auto& row : t.rows) {
    std::size_t config = 0;
    for (int p : parents) config = config * t.cardinalities[static_cast<std::size_t>(p)] + static_cast<std::size_t>(row[static_cast<std::size_t>(p)]);
    auto& c = counts[config];
    if (c.empty()) c.assign(r, 0);
    ++c[static_cast<std::size_t>(row[v])];
  }
  return counts;
}

double family_cost(const DiscreteTable& t, std::size_t v, const std::vector<int>& parents, double b) {
  double q = 1.0;
  for (int p : parents) q *= static_cast<double>(t.cardinalities[static_cast<std::size_t>(p)]);
  const double r = static_cast<double>(t.cardinalities[v]);
  double bits = b * (r - 1.0) * q;
  for (const auto& [config, c] : family_counts(t, v, parents)) {
    std::size_t nj = 0;
    for (std::size_t x : c) nj += x;
    for (std::size_t x : c) {
      if (x == 0) continue;
      bits -= static_cast<double>(x) * std::log2(static_cast<double>(x) / static_cast<double>(nj));
    }
  }
  return bits;
}

void check_table(const DiscreteTable& t, const NetworkStructure& s) {
  if (t.rows.empty()) throw Error(ErrorCode::empty_input, "discrete table is empty");
  if (s.parents.size() != t.cardinalities.size()) {
    throw Error(ErrorCode::parameter, "structure and table disagree on the variable count");
  }
}

bool reaches(const std::vector<std::vector<int>>& parents, std::size_t from, std::size_t to) {
  // Is there a directed path from -> ... -> to? Walk parent links backwards from `to`.
  std::vector<char> seen(parents.size(), 0);
  std::vector<std::size_t> stack{to};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (v == from) return true;
    if (seen[v]) continue;
    seen[v] = 1;
    for (int p : parents[v]) stack.push_back(static_cast<std::size_t>(p));
  }
  return false;
}

}  // namespace

double description_length(const DiscreteTable& table, const NetworkStructure& structure) {
  check_table(table, structure);
  const double b = std::log2(static_cast<double>(table.rows.size())) / 2.0;
  double total = 0.0;
  for (std::size_t v = 0; v < structure.parents.size(); ++v) total += family_cost(table, v, structure.parents[v], b);
  return total;
}

BayesianNetwork train_bayesian_network(const Dataset& train, const BayesNetOptions& options) {
  if (train.size() == 0) throw Error(ErrorCode::empty_input, "training set is empty");
  if (options.max_parents < 0) throw Error(ErrorCode::parameter, "max_parents must be non-negative");
  if (!(options.smoothing >= 0.0)) throw Error(ErrorCode::parameter, "smoothing must be non-negative");

  BayesianNetwork m;
  m.discretizer_ = Discretizer::fit(train, options.numeric_bins);
  const DiscreteTable table = discretize_for_network(train, options.numeric_bins);
  const std::size_t nv = table.cardinalities.size();
  const double b = std::log2(static_cast<double>(table.rows.size())) / 2.0;

  NetworkStructure s;
  s.parents.assign(nv, {});
  std::vector<double> cost(nv);
  for (std::size_t v = 0; v < nv; ++v) cost[v] = family_cost(table, v, {}, b);

  // Cached deltas per (child, candidate parent); only the changed family is rescored.
  const double unknown = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> delta(nv, std::vector<double>(nv, unknown));
  for (;;) {
    double best = -1e-9;
    std::size_t best_v = nv;
    std::size_t best_u = nv;
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t u = 0; u < nv; ++u) {
        if (u == v) continue;
        const auto& pa = s.parents[v];
        const bool present = std::find(pa.begin(), pa.end(), static_cast<int>(u)) != pa.end();
        if (!present) {
          if (static_cast<int>(pa.size()) >= options.max_parents) continue;
          if (reaches(s.parents, v, u)) continue;
        }
        if (std::isnan(delta[v][u])) {
          std::vector<int> next = pa;
          if (present) next.erase(std::find(next.begin(), next.end(), static_cast<int>(u)));
          else next.insert(std::upper_bound(next.begin(), next.end(), static_cast<int>(u)), static_cast<int>(u));
          delta[v][u] = family_cost(table, v, next, b) - cost[v];
        }
        if (delta[v][u] < best) {
          best = delta[v][u];
          best_v = v;
          best_u = u;
        }
      }
    }
    if (best_v == nv) break;
    auto& pa = s.parents[best_v];
    auto it = std::find(pa.begin(), pa.end(), static_cast<int>(best_u));
    if (it != pa.end()) pa.erase(it);
    else pa.insert(std::upper_bound(pa.begin(), pa.end(), static_cast<int>(best_u)), static_cast<int>(best_u));
    cost[best_v] += best;
    std::fill(delta[best_v].begin(), delta[best_v].end(), unknown);
  }

  m.structure_ = s;
  m.cardinalities_ = table.cardinalities;
  m.description_length_ = description_length(table, s);
  m.cpts_.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    std::size_t q = 1;
    for (int p : s.parents[v]) q *= table.cardinalities[static_cast<std::size_t>(p)];
    const std::size_t r = table.cardinalities[v];
    std::vector<double> cpt(q * r, 0.0);
    const auto counts = family_counts(table, v, s.parents[v]);
    for (std::size_t config = 0; config < q; ++config) {
      auto it = counts.find(config);
      std::size_t nj = 0;
      if (it != counts.end()) {
        for (std::size_t x : it->second) nj += x;
      }
      const double denom = static_cast<double>(nj) + options.smoothing * static_cast<double>(r);
      for (std::size_t x = 0; x < r; ++x) {
        const double c = it != counts.end() ? static_cast<double>(it->second[x]) : 0.0;
        cpt[config * r + x] = denom > 0.0 ? safe_log2((c + options.smoothing) / denom) : -std::log2(static_cast<double>(r));
      }
    }
    m.cpts_[v] = std::move(cpt);
  }
  return m;
}

std::vector<double> BayesianNetwork::posterior(const Record& query) const {
  if (cpts_.empty()) throw Error(ErrorCode::configuration, "Bayesian network is not trained");
  auto x = discretizer_.encode(query);
  const std::size_t nv = cardinalities_.size();
  const std::size_t cls = nv - 1;
  x.push_back(0);
  std::vector<double> scores(cardinalities_[cls]);
  for (std::size_t y = 0; y < scores.size(); ++y) {
    x[cls] = static_cast<int>(y);
    double s = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      std::size_t config = 0;
      for (int p : structure_.parents[v]) config = config * cardinalities_[static_cast<std::size_t>(p)] + static_cast<std::size_t>(x[static_cast<std::size_t>(p)]);
      s += cpts_[v][config * cardinalities_[v] + static_cast<std::size_t>(x[v])];
    }
    scores[y] = s;
  }
  return normalize_log2(scores);
}

int BayesianNetwork::predict(const Record& query) const { return argmax(posterior(query)); }

int bn_classify(const BayesianNetwork& model, const Record& query) { return model.predict(query); }

}  // namespace dirtybench
