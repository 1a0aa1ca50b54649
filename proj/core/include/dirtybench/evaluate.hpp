#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dirtybench/classify.hpp"
#include "dirtybench/cluster.hpp"
#include "dirtybench/corruption.hpp"
#include "dirtybench/dataset.hpp"
#include "dirtybench/regress.hpp"

namespace dirtybench {

enum class Task { classification, clustering, regression };

std::string_view to_string(Task task) noexcept;
Task task_from_string(std::string_view name);

enum class AlgorithmId {
  decision_tree,
  knn,
  naive_bayes,
  bayesian_network,
  logistic_regression,
  random_forest,
  kmeans,
  lvq,
  clarans,
  dbscan,
  birch,
  cure,
  least_squares,
  maximum_likelihood,
  polynomial,
  stepwise,
  scripted,
};

std::string_view to_string(AlgorithmId id) noexcept;
AlgorithmId algorithm_from_string(std::string_view name);
Task task_of(AlgorithmId id) noexcept;
/// The sixteen benchmarked algorithms (the scripted stub excluded).
const std::vector<AlgorithmId>& all_algorithms();

struct Hyperparameters {
  SplitCriterion tree_criterion = SplitCriterion::gini;
  TreeLimits tree_limits;
  std::size_t knn_k = 5;
  double nb_smoothing = 1.0;
  std::size_t numeric_bins = 10;
  BayesNetOptions bayes_net;
  LogisticOptions logistic;
  std::size_t forest_trees = 50;
  double forest_feature_fraction = 0.0;
  bool forest_bootstrap = true;

  /// Cluster count for the partitioning methods; 0 selects the class count.
  std::size_t cluster_k = 0;
  std::size_t kmeans_max_iters = 100;
  std::size_t kmeans_n_init = 10;
  double lvq_learning_rate = 0.05;
  std::size_t lvq_iterations = 2000;
  std::size_t lvq_prototypes = 0;
  std::size_t clarans_num_local = 2;
  std::size_t clarans_max_neighbor = 0;
  /// 0 selects the 90th-percentile rule on the clean data.
  double dbscan_eps = 0.0;
  std::size_t dbscan_min_pts = 4;
  std::size_t birch_branching = 10;
  double birch_threshold = 0.1;
  std::size_t cure_n_rep = 5;
  double cure_shrink = 0.3;
  double cure_sample_fraction = 0.25;

  int poly_degree = 3;
  StepwiseOptions stepwise;
  MleOptions mle;

  /// Scripted stub: (rate, value) pairs; the stub reports P = R = F = value.
  std::vector<std::pair<double, double>> script;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

/// F from P and R; 0 when both are 0.
double harmonic_f(double precision, double recall);

/// Macro-averaged precision and recall over classes 0..n_c-1. Predictions
/// may use the extra label n_c, which is wrong for every row. A class that
/// is never predicted contributes precision 0.
PRF macro_precision_recall_f(std::span<const int> predicted, std::span<const int> truth, std::size_t n_classes);

/// Relabels cluster indices as class labels. With as many clusters as
/// classes the one-to-one mapping maximizing agreement is used; otherwise
/// every cluster takes its most frequent true class. Noise rows get n_c.
std::vector<int> match_clusters(const Clustering& clustering, std::span<const int> truth, std::size_t n_classes);

struct RegressionMeasures {
  double rmsd = 0.0;
  /// Absent when the predicted values have zero range.
  std::optional<double> nrmsd;
  /// Absent when the predicted mean is zero.
  std::optional<double> cv_rmsd;
};

/// RMSD, RMSD over the predicted range, RMSD over the predicted mean.
RegressionMeasures regression_measures(std::span<const double> predicted, std::span<const double> truth);

/// Seeded shuffle of 0..n-1 cut into `folds` contiguous slices whose sizes
/// differ by at most one.
std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t folds, std::uint64_t seed);

/// Seed of the fold layout used by cross_validate for a given run seed.
std::uint64_t fold_seed(std::uint64_t seed);

struct EvalOptions {
  std::size_t folds = 10;
  bool timing = true;
  std::size_t timing_repeats = 5;
};

struct EvalResult {
  std::string dataset;
  AlgorithmId algorithm = AlgorithmId::decision_tree;
  Task task = Task::classification;
  ErrorType error_type = ErrorType::missing;
  double rate = 0.0;
  std::uint64_t seed = 0;

  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_measure;
  std::optional<double> rmsd;
  std::optional<double> nrmsd;
  std::optional<double> cv_rmsd;

  std::vector<PRF> fold_prf;
  std::vector<RegressionMeasures> fold_regression;
  std::optional<double> time_log10_ms;
  std::vector<std::string> flags;
};

/// Corrupts `clean` per `spec`, then evaluates `algorithm`: k-fold cross
/// validation for classification and regression (imputation fitted on the
/// training part), one fold-free run for clustering. Truth always comes from
/// the clean rows. Fold layout and algorithm seeds derive from `seed` only,
/// so they stay fixed across error rates.
EvalResult cross_validate(const Dataset& clean, AlgorithmId algorithm, const Hyperparameters& hyper,
                          const CorruptionSpec& spec, const EvalOptions& options, std::uint64_t seed,
                          std::string dataset_id = {});

/// Train on `train`, predict `test`; both must already be imputed.
std::vector<int> train_and_classify(const Dataset& train, const Dataset& test, AlgorithmId algorithm,
                                    const Hyperparameters& hyper, std::uint64_t seed);
std::vector<double> train_and_regress(const Dataset& train, const Dataset& test, AlgorithmId algorithm,
                                      const Hyperparameters& hyper, std::vector<std::string>* flags = nullptr);
/// Clusters an encoded point set; `labels` is needed by LVQ only.
Clustering run_clustering(const Points& points, std::span<const int> labels, std::size_t n_classes,
                          AlgorithmId algorithm, const Hyperparameters& hyper, std::uint64_t seed, double dbscan_eps);

}  // namespace dirtybench
