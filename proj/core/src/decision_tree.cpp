#include <algorithm>
#include <functional>

#include "dirtybench/classify.hpp"
#include "dirtybench/error.hpp"
#include "tree_builder.hpp"

namespace dirtybench {

std::string_view to_string(SplitCriterion criterion) noexcept {
  switch (criterion) {
    case SplitCriterion::gini: return "gini";
    case SplitCriterion::gain: return "gain";
    case SplitCriterion::error: return "error";
  }
  return "gini";
}

SplitCriterion split_criterion_from_string(std::string_view name) {
  if (name == "gini") return SplitCriterion::gini;
  if (name == "gain" || name == "entropy") return SplitCriterion::gain;
  if (name == "error") return SplitCriterion::error;
  throw Error(ErrorCode::parameter, "unknown split criterion '" + std::string(name) + "'");
}

int majority_vote(std::span<const int> labels, std::size_t n_classes) {
  if (labels.empty()) throw Error(ErrorCode::empty_input, "no labels to vote on");
  std::vector<std::size_t> counts(n_classes, 0);
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= n_classes) throw Error(ErrorCode::parameter, "label out of range");
    ++counts[static_cast<std::size_t>(l)];
  }
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

int DecisionTree::predict(const Record& record) const {
  if (nodes_.empty()) throw Error(ErrorCode::configuration, "decision tree is not trained");
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& node = nodes_[i];
    const Cell& cell = record.cells.at(static_cast<std::size_t>(node.column));
    bool go_left = false;
    if (node.categorical) {
      const auto* s = std::get_if<std::string>(&cell);
      if (!s) throw Error(ErrorCode::type, "missing categorical value; impute first");
      go_left = *s == node.category;
    } else {
      const auto* v = std::get_if<double>(&cell);
      if (!v) throw Error(ErrorCode::type, "missing numeric value; impute first");
      go_left = *v <= node.threshold;
    }
    i = static_cast<std::size_t>(go_left ? node.left : node.right);
  }
  return nodes_[i].label;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::function<int(std::size_t)> walk = [&](std::size_t i) -> int {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(walk(static_cast<std::size_t>(n.left)), walk(static_cast<std::size_t>(n.right)));
  };
  return walk(0);
}

namespace detail {

TreeTrainingData TreeTrainingData::from(const Dataset& train) {
  if (train.size() == 0) throw Error(ErrorCode::empty_input, "training set is empty");
  TreeTrainingData d;
  const Schema& schema = train.schema();
  d.labels = class_labels(train);
  d.n_classes = schema.class_count();
  for (std::size_t c : schema.feature_indices()) {
    const bool cat = schema.column(c).kind == ColumnKind::categorical;
    d.columns.push_back(c);
    d.categorical.push_back(cat);
    std::vector<double> num;
    std::vector<int> codes;
    std::vector<std::string> cats;
    for (const Record& rec : train.rows()) {
      const Cell& cell = rec.cells[c];
      if (cat) {
        const auto* s = std::get_if<std::string>(&cell);
        if (!s) throw Error(ErrorCode::type, "missing value in '" + schema.column(c).name + "'; impute first");
        auto it = std::find(cats.begin(), cats.end(), *s);
        if (it == cats.end()) {
          cats.push_back(*s);
          it = cats.end() - 1;
        }
        codes.push_back(static_cast<int>(it - cats.begin()));
      } else {
        const auto* v = std::get_if<double>(&cell);
        if (!v) throw Error(ErrorCode::type, "missing value in '" + schema.column(c).name + "'; impute first");
        num.push_back(*v);
      }
    }
    d.numeric.push_back(std::move(num));
    d.codes.push_back(std::move(codes));
    d.categories.push_back(std::move(cats));
  }
  return d;
}

namespace {

double impurity(SplitCriterion criterion, std::span<const std::size_t> counts) {
  switch (criterion) {
    case SplitCriterion::gini: return gini(counts);
    case SplitCriterion::gain: return entropy(counts);
    case SplitCriterion::error: return misclassification_error(counts);
  }
  return gini(counts);
}

struct Split {
  bool found = false;
  double score = 0.0;
  std::size_t feature = 0;
  double threshold = 0.0;
  int code = 0;
};

class Builder {
 public:
  Builder(const TreeTrainingData& data, SplitCriterion criterion, TreeLimits limits, std::size_t per_split, Rng* rng)
      : data_(data), criterion_(criterion), limits_(limits), per_split_(per_split), rng_(rng) {}

  std::vector<TreeNode> run(std::vector<std::size_t> rows) {
    build(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  std::vector<std::size_t> counts_of(const std::vector<std::size_t>& rows) const {
    std::vector<std::size_t> counts(data_.n_classes, 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(data_.labels[r])];
    return counts;
  }

  double weighted(const std::vector<std::size_t>& left, std::size_t nl, const std::vector<std::size_t>& right,
                  std::size_t nr) const {
    const double n = static_cast<double>(nl + nr);
    return static_cast<double>(nl) / n * impurity(criterion_, left) +
           static_cast<double>(nr) / n * impurity(criterion_, right);
  }

  void scan_numeric(std::size_t f, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& parent,
                    Split& best) const {
    const auto& values = data_.numeric[f];
    std::vector<std::size_t> order = rows;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::size_t> left(data_.n_classes, 0);
    std::vector<std::size_t> right = parent;
    const std::size_t n = order.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto lab = static_cast<std::size_t>(data_.labels[order[i]]);
      ++left[lab];
      --right[lab];
      const double v = values[order[i]];
      const double next = values[order[i + 1]];
      if (v == next) continue;
      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      if (nl < limits_.min_leaf_rows || nr < limits_.min_leaf_rows) continue;
      const double score = weighted(left, nl, right, nr);
      if (!best.found || score < best.score) {
        best = Split{true, score, f, v + (next - v) / 2.0, 0};
      }
    }
  }

  void scan_categorical(std::size_t f, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& parent,
                        Split& best) const {
    const auto& codes = data_.codes[f];
    const std::size_t k = data_.categories[f].size();
    std::vector<std::vector<std::size_t>> per(k, std::vector<std::size_t>(data_.n_classes, 0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t r : rows) {
      ++per[static_cast<std::size_t>(codes[r])][static_cast<std::size_t>(data_.labels[r])];
      ++sizes[static_cast<std::size_t>(codes[r])];
    }
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t nl = sizes[c];
      const std::size_t nr = rows.size() - nl;
      if (nl == 0 || nr == 0) continue;
      if (nl < limits_.min_leaf_rows || nr < limits_.min_leaf_rows) continue;
      std::vector<std::size_t> right(data_.n_classes);
      for (std::size_t j = 0; j < data_.n_classes; ++j) right[j] = parent[j] - per[c][j];
      const double score = weighted(per[c], nl, right, nr);
      if (!best.found || score < best.score) best = Split{true, score, f, 0.0, static_cast<int>(c)};
    }
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t n = data_.columns.size();
    std::vector<std::size_t> out;
    if (rng_ == nullptr || per_split_ >= n) {
      out.resize(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = i;
    } else {
      out = rng_->sample(n, per_split_);
      std::sort(out.begin(), out.end());
    }
    return out;
  }

  int build(std::vector<std::size_t> rows, int depth) {
    const auto counts = counts_of(rows);
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[static_cast<std::size_t>(index)].label =
        static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());

    const double parent_impurity = impurity(criterion_, counts);
    if (parent_impurity <= 0.0 || depth >= limits_.max_depth || rows.size() < 2 * limits_.min_leaf_rows) {
      return index;
    }
    Split best;
    for (std::size_t f : candidate_features()) {
      if (data_.categorical[f]) scan_categorical(f, rows, counts, best);
      else scan_numeric(f, rows, counts, best);
    }
    if (!best.found || !(best.score < parent_impurity - 1e-12)) return index;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t r : rows) {
      const bool go_left = data_.categorical[best.feature] ? data_.codes[best.feature][r] == best.code
                                                           : data_.numeric[best.feature][r] <= best.threshold;
      (go_left ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    TreeNode node = nodes_[static_cast<std::size_t>(index)];
    node.column = static_cast<int>(data_.columns[best.feature]);
    node.categorical = data_.categorical[best.feature];
    if (node.categorical) node.category = data_.categories[best.feature][static_cast<std::size_t>(best.code)];
    else node.threshold = best.threshold;
    node.left = build(std::move(left_rows), depth + 1);
    node.right = build(std::move(right_rows), depth + 1);
    nodes_[static_cast<std::size_t>(index)] = std::move(node);
    return index;
  }

  const TreeTrainingData& data_;
  SplitCriterion criterion_;
  TreeLimits limits_;
  std::size_t per_split_;
  Rng* rng_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree grow_tree(const TreeTrainingData& data, const std::vector<std::size_t>& rows, SplitCriterion criterion,
                       TreeLimits limits, std::size_t features_per_split, Rng* rng) {
  if (rows.empty()) throw Error(ErrorCode::empty_input, "no rows to grow a tree on");
  if (limits.min_leaf_rows == 0) throw Error(ErrorCode::parameter, "min_leaf_rows must be at least 1");
  if (limits.max_depth < 0) throw Error(ErrorCode::parameter, "max_depth must be non-negative");
  return DecisionTree(Builder(data, criterion, limits, features_per_split, rng).run(rows));
}

}  // namespace detail

DecisionTree train_decision_tree(const Dataset& train, SplitCriterion criterion, TreeLimits limits) {
  const auto data = detail::TreeTrainingData::from(train);
  std::vector<std::size_t> rows(train.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return detail::grow_tree(data, rows, criterion, limits, data.columns.size(), nullptr);
}

}  // namespace dirtybench
