#include "dirtybench/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "dirtybench/error.hpp"
#include "dirtybench/random.hpp"

namespace dirtybench {

namespace {

struct AlgorithmInfo {
  AlgorithmId id;
  std::string_view name;
  Task task;
};

constexpr AlgorithmInfo kAlgorithms[] = {
    {AlgorithmId::decision_tree, "decision_tree", Task::classification},
    {AlgorithmId::knn, "knn", Task::classification},
    {AlgorithmId::naive_bayes, "naive_bayes", Task::classification},
    {AlgorithmId::bayesian_network, "bayesian_network", Task::classification},
    {AlgorithmId::logistic_regression, "logistic_regression", Task::classification},
    {AlgorithmId::random_forest, "random_forest", Task::classification},
    {AlgorithmId::kmeans, "kmeans", Task::clustering},
    {AlgorithmId::lvq, "lvq", Task::clustering},
    {AlgorithmId::clarans, "clarans", Task::clustering},
    {AlgorithmId::dbscan, "dbscan", Task::clustering},
    {AlgorithmId::birch, "birch", Task::clustering},
    {AlgorithmId::cure, "cure", Task::clustering},
    {AlgorithmId::least_squares, "least_squares", Task::regression},
    {AlgorithmId::maximum_likelihood, "maximum_likelihood", Task::regression},
    {AlgorithmId::polynomial, "polynomial", Task::regression},
    {AlgorithmId::stepwise, "stepwise", Task::regression},
    {AlgorithmId::scripted, "scripted", Task::classification},
};

const AlgorithmInfo& info(AlgorithmId id) {
  for (const auto& a : kAlgorithms) {
    if (a.id == id) return a;
  }
  return kAlgorithms[0];
}

/// Min-cost assignment on a square matrix; returns column per row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

Error annotate(const Error& e, const std::string& where) { return Error(e.code(), where + ": " + e.detail()); }

}  // namespace

std::string_view to_string(Task task) noexcept {
  switch (task) {
    case Task::classification: return "classification";
    case Task::clustering: return "clustering";
    case Task::regression: return "regression";
  }
  return "classification";
}

Task task_from_string(std::string_view name) {
  if (name == "classification") return Task::classification;
  if (name == "clustering") return Task::clustering;
  if (name == "regression") return Task::regression;
  throw Error(ErrorCode::configuration, "unknown task '" + std::string(name) + "'");
}

std::string_view to_string(AlgorithmId id) noexcept { return info(id).name; }

AlgorithmId algorithm_from_string(std::string_view name) {
  for (const auto& a : kAlgorithms) {
    if (a.name == name) return a.id;
  }
  throw Error(ErrorCode::configuration, "unknown algorithm '" + std::string(name) + "'");
}

Task task_of(AlgorithmId id) noexcept { return info(id).task; }

const std::vector<AlgorithmId>& all_algorithms() {
  static const std::vector<AlgorithmId> ids = [] {
    std::vector<AlgorithmId> out;
    for (const auto& a : kAlgorithms) {
      if (a.id != AlgorithmId::scripted) out.push_back(a.id);
    }
    return out;
  }();
  return ids;
}

std::uint64_t fold_seed(std::uint64_t seed) { return derive_seed(seed, 0xF01DULL); }

double harmonic_f(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

PRF macro_precision_recall_f(std::span<const int> predicted, std::span<const int> truth, std::size_t n_classes) {
  if (predicted.empty() || truth.empty()) throw Error(ErrorCode::empty_input, "no labels to score");
  if (predicted.size() != truth.size()) throw Error(ErrorCode::parameter, "prediction count does not match truth");
  if (n_classes == 0) throw Error(ErrorCode::parameter, "need at least one class");
  std::vector<std::size_t> rc(n_classes, 0), rn(n_classes, 0), r(n_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    if (t < 0 || static_cast<std::size_t>(t) >= n_classes) throw Error(ErrorCode::parameter, "true label out of range");
    if (p < 0 || static_cast<std::size_t>(p) > n_classes) throw Error(ErrorCode::parameter, "predicted label out of range");
    ++r[static_cast<std::size_t>(t)];
    if (static_cast<std::size_t>(p) < n_classes) ++rn[static_cast<std::size_t>(p)];
    if (p == t) ++rc[static_cast<std::size_t>(t)];
  }
  PRF out;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (rn[c] > 0) out.precision += static_cast<double>(rc[c]) / static_cast<double>(rn[c]);
    if (r[c] > 0) out.recall += static_cast<double>(rc[c]) / static_cast<double>(r[c]);
  }
  out.precision /= static_cast<double>(n_classes);
  out.recall /= static_cast<double>(n_classes);
  out.f_measure = harmonic_f(out.precision, out.recall);
  return out;
}

std::vector<int> match_clusters(const Clustering& clustering, std::span<const int> truth, std::size_t n_classes) {
  const std::size_t n = clustering.assignments.size();
  if (truth.size() != n) throw Error(ErrorCode::parameter, "truth count does not match the clustering");
  clustering.validate();
  const std::size_t k = clustering.n_clusters;
  const int noise_label = static_cast<int>(n_classes);
  std::vector<std::vector<std::size_t>> agree(k, std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const int a = clustering.assignments[i];
    if (a == kNoise) continue;
    if (truth[i] < 0 || static_cast<std::size_t>(truth[i]) >= n_classes) {
      throw Error(ErrorCode::parameter, "true label out of range");
    }
    ++agree[static_cast<std::size_t>(a)][static_cast<std::size_t>(truth[i])];
  }

  std::vector<int> label_of(k, noise_label);
  if (k == n_classes && k > 0) {
    if (k <= 8) {
      std::vector<int> perm(k);
      std::iota(perm.begin(), perm.end(), 0);
      std::size_t best = 0;
      bool have = false;
      do {
        std::size_t score = 0;
        for (std::size_t c = 0; c < k; ++c) score += agree[c][static_cast<std::size_t>(perm[c])];
        if (!have || score > best) {
          best = score;
          label_of = perm;
          have = true;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
      std::vector<std::vector<double>> cost(k, std::vector<double>(k));
      for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < k; ++j) cost[c][j] = -static_cast<double>(agree[c][j]);
      }
      const auto a = hungarian(cost);
      for (std::size_t c = 0; c < k; ++c) label_of[c] = static_cast<int>(a[c]);
    }
  } else {
    for (std::size_t c = 0; c < k; ++c) {
      const auto& row = agree[c];
      if (n_classes == 0) continue;
      label_of[c] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
  }
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = clustering.assignments[i];
    out[i] = a == kNoise ? noise_label : label_of[static_cast<std::size_t>(a)];
  }
  return out;
}

RegressionMeasures regression_measures(std::span<const double> predicted, std::span<const double> truth) {
  RegressionMeasures m;
  m.rmsd = rmsd(predicted, truth);
  const auto [lo, hi] = std::minmax_element(predicted.begin(), predicted.end());
  if (*hi > *lo) m.nrmsd = m.rmsd / (*hi - *lo);
  const double mean = std::accumulate(predicted.begin(), predicted.end(), 0.0) / static_cast<double>(predicted.size());
  if (mean != 0.0) m.cv_rmsd = m.rmsd / mean;
  return m;
}

std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::parameter, "need at least 2 folds");
  if (n < folds) {
    throw Error(ErrorCode::parameter, std::to_string(n) + " rows cannot fill " + std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t start = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = n / folds + (f < n % folds ? 1 : 0);
    out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                  order.begin() + static_cast<std::ptrdiff_t>(start + size));
    start += size;
  }
  return out;
}

std::vector<int> train_and_classify(const Dataset& train, const Dataset& test, AlgorithmId algorithm,
                                    const Hyperparameters& hyper, std::uint64_t seed) {
  ClassifierModel model;
  switch (algorithm) {
    case AlgorithmId::decision_tree:
      model = train_decision_tree(train, hyper.tree_criterion, hyper.tree_limits);
      break;
    case AlgorithmId::knn:
      model = KnnModel::fit(train, hyper.knn_k);
      break;
    case AlgorithmId::naive_bayes:
      model = train_naive_bayes(train, hyper.nb_smoothing, hyper.numeric_bins);
      break;
    case AlgorithmId::bayesian_network: {
      BayesNetOptions o = hyper.bayes_net;
      o.numeric_bins = hyper.numeric_bins;
      model = train_bayesian_network(train, o);
      break;
    }
    case AlgorithmId::logistic_regression:
      model = train_logistic(train, hyper.logistic);
      break;
    case AlgorithmId::random_forest: {
      ForestOptions o;
      o.n_trees = hyper.forest_trees;
      o.feature_fraction = hyper.forest_feature_fraction;
      o.bootstrap = hyper.forest_bootstrap;
      o.seed = seed;
      o.criterion = hyper.tree_criterion;
      o.limits = hyper.tree_limits;
      model = train_random_forest(train, o);
      break;
    }
    default:
      throw Error(ErrorCode::configuration, std::string(to_string(algorithm)) + " is not a classifier");
  }
  std::vector<int> out;
  out.reserve(test.size());
  for (const Record& rec : test.rows()) out.push_back(classify(model, rec));
  return out;
}

std::vector<double> train_and_regress(const Dataset& train, const Dataset& test, AlgorithmId algorithm,
                                      const Hyperparameters& hyper, std::vector<std::string>* flags) {
  RegressionModel model;
  switch (algorithm) {
    case AlgorithmId::least_squares: model = fit_least_squares(train); break;
    case AlgorithmId::maximum_likelihood: model = fit_maximum_likelihood(train, hyper.mle).model; break;
    case AlgorithmId::polynomial: model = fit_polynomial(train, hyper.poly_degree); break;
    case AlgorithmId::stepwise: model = fit_stepwise(train, hyper.stepwise); break;
    default: throw Error(ErrorCode::configuration, std::string(to_string(algorithm)) + " is not a regressor");
  }
  if (flags && model.ridge_fallback &&
      std::find(flags->begin(), flags->end(), "ridge_fallback") == flags->end()) {
    flags->push_back("ridge_fallback");
  }
  std::vector<double> out;
  out.reserve(test.size());
  for (const Record& rec : test.rows()) out.push_back(model.predict(rec));
  return out;
}

Clustering run_clustering(const Points& points, std::span<const int> labels, std::size_t n_classes,
                          AlgorithmId algorithm, const Hyperparameters& hyper, std::uint64_t seed, double dbscan_eps) {
  const std::size_t k = hyper.cluster_k == 0 ? n_classes : hyper.cluster_k;
  switch (algorithm) {
    case AlgorithmId::kmeans:
      return kmeans(points, {k, seed, hyper.kmeans_max_iters, hyper.kmeans_n_init}).clustering;
    case AlgorithmId::lvq:
      return lvq(points, labels, n_classes,
                 {hyper.lvq_prototypes, hyper.lvq_learning_rate, hyper.lvq_iterations, seed})
          .clustering;
    case AlgorithmId::clarans:
      return clarans(points, {k, hyper.clarans_num_local, hyper.clarans_max_neighbor, seed}).clustering;
    case AlgorithmId::dbscan:
      return dbscan(points, {dbscan_eps, hyper.dbscan_min_pts}).clustering;
    case AlgorithmId::birch:
      return birch(points, {hyper.birch_branching, hyper.birch_threshold, k}).clustering;
    case AlgorithmId::cure:
      return cure(points, {k, hyper.cure_n_rep, hyper.cure_shrink, hyper.cure_sample_fraction, seed}).clustering;
    default:
      throw Error(ErrorCode::configuration, std::string(to_string(algorithm)) + " is not a clustering method");
  }
}

namespace {

void evaluate_classification(const Dataset& corrupted, AlgorithmId algorithm, const Hyperparameters& hyper,
                             const EvalOptions& options, std::uint64_t seed, EvalResult& r) {
  const std::size_t nc = corrupted.schema().class_count();
  require_classification(corrupted.schema());
  const auto folds = fold_partition(corrupted.size(), options.folds, fold_seed(seed));
  r.fold_prf.clear();
  std::vector<double> ps, rs;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    try {
      std::vector<std::size_t> train_idx;
      for (std::size_t g = 0; g < folds.size(); ++g) {
        if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
      }
      std::sort(train_idx.begin(), train_idx.end());
      std::vector<std::size_t> test_idx = folds[f];
      std::sort(test_idx.begin(), test_idx.end());
      const Imputer imputer = Imputer::fit(corrupted.subset(train_idx));
      const Dataset train = imputer.apply(corrupted.subset(train_idx));
      const Dataset test = imputer.apply(corrupted.subset(test_idx));
      const auto predicted = train_and_classify(train, test, algorithm, hyper, derive_seed(seed, f));
      const auto truth = clean_class_labels(test);
      const PRF prf = macro_precision_recall_f(predicted, truth, nc);
      r.fold_prf.push_back(prf);
      ps.push_back(prf.precision);
      rs.push_back(prf.recall);
    } catch (const Error& e) {
      throw annotate(e, "fold " + std::to_string(f));
    }
  }
  r.precision = mean_of(ps);
  r.recall = mean_of(rs);
  r.f_measure = harmonic_f(*r.precision, *r.recall);
}

void evaluate_regression(const Dataset& corrupted, AlgorithmId algorithm, const Hyperparameters& hyper,
                         const EvalOptions& options, std::uint64_t seed, EvalResult& r) {
  const auto folds = fold_partition(corrupted.size(), options.folds, fold_seed(seed));
  r.fold_regression.clear();
  std::vector<double> rm, nr, cv;
  std::vector<std::string> flags;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    try {
      std::vector<std::size_t> train_idx;
      for (std::size_t g = 0; g < folds.size(); ++g) {
        if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
      }
      std::sort(train_idx.begin(), train_idx.end());
      std::vector<std::size_t> test_idx = folds[f];
      std::sort(test_idx.begin(), test_idx.end());
      const Imputer imputer = Imputer::fit(corrupted.subset(train_idx));
      const Dataset train = imputer.apply(corrupted.subset(train_idx));
      const Dataset test = imputer.apply(corrupted.subset(test_idx));
      const auto predicted = train_and_regress(train, test, algorithm, hyper, &flags);
      const auto truth = clean_numeric_targets(test);
      const RegressionMeasures m = regression_measures(predicted, truth);
      r.fold_regression.push_back(m);
      rm.push_back(m.rmsd);
      if (m.nrmsd) nr.push_back(*m.nrmsd);
      if (m.cv_rmsd) cv.push_back(*m.cv_rmsd);
    } catch (const Error& e) {
      throw annotate(e, "fold " + std::to_string(f));
    }
  }
  r.rmsd = mean_of(rm);
  if (!nr.empty()) r.nrmsd = mean_of(nr);
  if (!cv.empty()) r.cv_rmsd = mean_of(cv);
  if (nr.size() < folds.size()) flags.push_back("nrmsd_undefined");
  if (cv.size() < folds.size()) flags.push_back("cv_undefined");
  r.flags = flags;
}

void evaluate_clustering(const Dataset& clean, const Dataset& corrupted, AlgorithmId algorithm,
                         const Hyperparameters& hyper, std::uint64_t seed, EvalResult& r) {
  require_classification(corrupted.schema());
  const std::size_t nc = corrupted.schema().class_count();
  const Dataset filled = impute(corrupted);
  const Points points = FeatureEncoder::fit(filled).encode_all(filled);
  std::vector<int> labels;
  if (algorithm == AlgorithmId::lvq) labels = class_labels(filled);
  double eps = hyper.dbscan_eps;
  if (algorithm == AlgorithmId::dbscan && !(eps > 0.0)) eps = default_dbscan_eps(clustering_points(clean), hyper.dbscan_min_pts);
  const Clustering c = run_clustering(points, labels, nc, algorithm, hyper, derive_seed(seed, 0xC1u), eps);
  const auto truth = clean_class_labels(corrupted);
  const PRF prf = macro_precision_recall_f(match_clusters(c, truth, nc), truth, nc);
  r.fold_prf = {prf};
  r.precision = prf.precision;
  r.recall = prf.recall;
  r.f_measure = harmonic_f(prf.precision, prf.recall);
  if (c.noise_count() > 0) r.flags.push_back("noise_rows=" + std::to_string(c.noise_count()));
}

void evaluate_scripted(const Hyperparameters& hyper, double rate, EvalResult& r) {
  for (const auto& [at, value] : hyper.script) {
    if (std::abs(at - rate) <= 1e-9) {
      if (!(value >= 0.0 && value <= 1.0)) throw Error(ErrorCode::parameter, "scripted value outside [0, 1]");
      r.precision = r.recall = value;
      r.f_measure = harmonic_f(value, value);
      r.fold_prf = {PRF{value, value, *r.f_measure}};
      return;
    }
  }
  throw Error(ErrorCode::parameter, "scripted algorithm has no value for rate " + format_number(rate));
}

}  // namespace

EvalResult cross_validate(const Dataset& clean, AlgorithmId algorithm, const Hyperparameters& hyper,
                          const CorruptionSpec& spec, const EvalOptions& options, std::uint64_t seed,
                          std::string dataset_id) {
  EvalResult r;
  r.dataset = std::move(dataset_id);
  r.algorithm = algorithm;
  r.task = task_of(algorithm);
  r.error_type = spec.error_type;
  r.rate = spec.rate;
  r.seed = seed;

  auto once = [&](EvalResult& out) {
    out.flags.clear();
    if (algorithm == AlgorithmId::scripted) {
      evaluate_scripted(hyper, spec.rate, out);
      return;
    }
    const Dataset corrupted = inject(clean, spec);
    switch (out.task) {
      case Task::classification: evaluate_classification(corrupted, algorithm, hyper, options, seed, out); break;
      case Task::regression: evaluate_regression(corrupted, algorithm, hyper, options, seed, out); break;
      case Task::clustering: evaluate_clustering(clean, corrupted, algorithm, hyper, seed, out); break;
    }
  };

  const std::size_t repeats = options.timing ? std::max<std::size_t>(options.timing_repeats, 1) : 1;
  double total_ms = 0.0;
  for (std::size_t t = 0; t < repeats; ++t) {
    const auto start = std::chrono::steady_clock::now();
    if (t == 0) {
      once(r);
    } else {
      EvalResult scratch = r;
      once(scratch);
    }
    total_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  if (options.timing) r.time_log10_ms = std::log10(std::max(total_ms / static_cast<double>(repeats), 1e-6));
  return r;
}

}  // namespace dirtybench
