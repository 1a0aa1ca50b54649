#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dirtybench/dataset.hpp"
#include "dirtybench/features.hpp"

namespace dirtybench {

// ---------------------------------------------------------------------------
// Node purity measures over class-count vectors. Entropy is in bits.

double gini(std::span<const std::size_t> counts);
double entropy(std::span<const std::size_t> counts);
double misclassification_error(std::span<const std::size_t> counts);
/// Entropy(parent) minus the size-weighted entropy of the partitions.
double information_gain(std::span<const std::size_t> parent,
                        std::span<const std::vector<std::size_t>> partitions);

// ---------------------------------------------------------------------------
// Decision tree

enum class SplitCriterion { gini, gain, error };

std::string_view to_string(SplitCriterion criterion) noexcept;
SplitCriterion split_criterion_from_string(std::string_view name);

struct TreeLimits {
  int max_depth = 25;
  std::size_t min_leaf_rows = 2;
};

struct TreeNode {
  /// Split column (dataset column index); -1 for leaves.
  int column = -1;
  bool categorical = false;
  /// Numeric split: value <= threshold goes left.
  double threshold = 0.0;
  /// Categorical split: value == category goes left.
  std::string category;
  int left = -1;
  int right = -1;
  int label = 0;

  bool is_leaf() const { return column < 0; }
  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  int predict(const Record& record) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

DecisionTree train_decision_tree(const Dataset& train, SplitCriterion criterion = SplitCriterion::gini,
                                 TreeLimits limits = {});

// ---------------------------------------------------------------------------
// K-nearest neighbours (unweighted majority vote, ties to the lowest label).

class KnnModel {
 public:
  static KnnModel fit(const Dataset& train, std::size_t k = 5);

  int predict(const Record& query) const;
  /// Training-row indices of the k nearest rows, nearest first; equal
  /// distances resolved by row index.
  std::vector<std::size_t> neighbors(const Record& query) const;

  std::size_t k() const { return k_; }

 private:
  FeatureEncoder encoder_;
  Points points_;
  std::vector<int> labels_;
  std::size_t k_ = 5;
  std::size_t n_classes_ = 0;
};

int knn_classify(const Dataset& train, const Record& query, std::size_t k);

// ---------------------------------------------------------------------------
// Naive Bayes over discretized features, Laplace-smoothed.

class NaiveBayes {
 public:
  int predict(const Record& query) const;
  /// Normalized posterior over class labels.
  std::vector<double> posterior(const Record& query) const;

  const std::vector<double>& priors() const { return priors_; }
  /// P(feature f takes code v | class j), indexed [f][j][v].
  const std::vector<std::vector<std::vector<double>>>& conditionals() const { return conditionals_; }

 private:
  friend NaiveBayes train_naive_bayes(const Dataset&, double, std::size_t);

  std::vector<double> log_scores(const Record& query) const;

  Discretizer discretizer_;
  std::vector<double> priors_;
  std::vector<std::vector<std::vector<double>>> conditionals_;
};

NaiveBayes train_naive_bayes(const Dataset& train, double smoothing = 1.0, std::size_t numeric_bins = 10);
int nb_classify(const NaiveBayes& model, const Record& query);

// ---------------------------------------------------------------------------
// Bayesian network with MDL structure search.

/// parents[v] lists the parent variables of v. Variables 0..n-1 are the
/// features in schema order, variable n is the class.
struct NetworkStructure {
  std::vector<std::vector<int>> parents;

  std::size_t edge_count() const;
  bool operator==(const NetworkStructure&) const = default;
};

/// Discrete training table for structure scoring: one row per record, the
/// class code last.
struct DiscreteTable {
  std::vector<std::vector<int>> rows;
  std::vector<std::size_t> cardinalities;
};

DiscreteTable discretize_for_network(const Dataset& train, std::size_t numeric_bins = 10);

/// Description length in bits: b|B| - sum_i log2 P(x_i | B) with maximum
/// likelihood parameters and b = log2(N) / 2.
double description_length(const DiscreteTable& table, const NetworkStructure& structure);

struct BayesNetOptions {
  int max_parents = 3;
  double smoothing = 1.0;
  std::size_t numeric_bins = 10;
};

class BayesianNetwork {
 public:
  int predict(const Record& query) const;
  std::vector<double> posterior(const Record& query) const;

  const NetworkStructure& structure() const { return structure_; }
  double description_length() const { return description_length_; }

 private:
  friend BayesianNetwork train_bayesian_network(const Dataset&, const BayesNetOptions&);

  Discretizer discretizer_;
  NetworkStructure structure_;
  std::vector<std::size_t> cardinalities_;
  /// cpts_[v][parent_config * card(v) + value], log2 probabilities.
  std::vector<std::vector<double>> cpts_;
  double description_length_ = 0.0;
};

BayesianNetwork train_bayesian_network(const Dataset& train, const BayesNetOptions& options = {});
int bn_classify(const BayesianNetwork& model, const Record& query);

// ---------------------------------------------------------------------------
// Binary logistic regression by batch gradient ascent.

double sigmoid(double z);

/// Mean log-likelihood of labels y in {0,1} under weights (w, b).
double logistic_log_likelihood(const Points& x, std::span<const int> y, std::span<const double> w, double b);
/// Gradient of logistic_log_likelihood; grad_w must have x.dim entries.
void logistic_gradient(const Points& x, std::span<const int> y, std::span<const double> w, double b,
                       std::span<double> grad_w, double& grad_b);

struct LogisticOptions {
  double learning_rate = 0.1;
  std::size_t iterations = 500;
};

class LogisticModel {
 public:
  int predict(const Record& query) const;
  double probability(const Record& query) const;

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  friend LogisticModel train_logistic(const Dataset&, const LogisticOptions&);

  FeatureEncoder encoder_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

LogisticModel train_logistic(const Dataset& train, const LogisticOptions& options = {});
int logistic_classify(const LogisticModel& model, const Record& query);

// ---------------------------------------------------------------------------
// Random forest

struct ForestOptions {
  std::size_t n_trees = 50;
  /// Fraction of features tried per split; 0 selects sqrt(n)/n.
  double feature_fraction = 0.0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  SplitCriterion criterion = SplitCriterion::gini;
  TreeLimits limits;
};

class RandomForest {
 public:
  int predict(const Record& query) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  std::size_t class_count() const { return n_classes_; }

  bool operator==(const RandomForest&) const = default;

 private:
  friend RandomForest train_random_forest(const Dataset&, const ForestOptions&);

  std::vector<DecisionTree> trees_;
  std::size_t n_classes_ = 0;
};

RandomForest train_random_forest(const Dataset& train, const ForestOptions& options = {});
int rf_classify(const RandomForest& model, const Record& query);

/// Majority vote over labels; ties go to the lowest label index.
int majority_vote(std::span<const int> labels, std::size_t n_classes);

// ---------------------------------------------------------------------------

using ClassifierModel =
    std::variant<DecisionTree, KnnModel, NaiveBayes, BayesianNetwork, LogisticModel, RandomForest>;

int classify(const ClassifierModel& model, const Record& query);

}  // namespace dirtybench
