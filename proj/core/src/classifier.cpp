#include <algorithm>
#include <cmath>

#include "dirtybench/classify.hpp"
#include "dirtybench/error.hpp"
#include "dirtybench/random.hpp"
#include "tree_builder.hpp"

namespace dirtybench {

RandomForest train_random_forest(const Dataset& train, const ForestOptions& options) {
  if (options.n_trees == 0) throw Error(ErrorCode::parameter, "forest needs at least one tree");
  if (options.feature_fraction < 0.0 || options.feature_fraction > 1.0) {
    throw Error(ErrorCode::parameter, "feature_fraction must lie in [0, 1]");
  }
  const auto data = detail::TreeTrainingData::from(train);
  const std::size_t nf = data.columns.size();
  const double fraction =
      options.feature_fraction > 0.0 ? options.feature_fraction : std::sqrt(static_cast<double>(nf)) / static_cast<double>(nf);
  std::size_t per_split = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(nf) - 1e-9));
  per_split = std::clamp<std::size_t>(per_split, 1, nf);

  RandomForest f;
  f.n_classes_ = data.n_classes;
  const std::size_t n = train.size();
  for (std::size_t t = 0; t < options.n_trees; ++t) {
    Rng rng(derive_seed(options.seed, t));
    std::vector<std::size_t> rows(n);
    if (options.bootstrap) {
      for (auto& r : rows) r = rng.uniform_index(n);
    } else {
      for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    }
    f.trees_.push_back(detail::grow_tree(data, rows, options.criterion, options.limits, per_split, &rng));
  }
  return f;
}

int RandomForest::predict(const Record& query) const {
  if (trees_.empty()) throw Error(ErrorCode::configuration, "random forest is not trained");
  std::vector<int> votes;
  votes.reserve(trees_.size());
  for (const auto& t : trees_) votes.push_back(t.predict(query));
  return majority_vote(votes, n_classes_);
}

int rf_classify(const RandomForest& model, const Record& query) { return model.predict(query); }

int classify(const ClassifierModel& model, const Record& query) {
  return std::visit([&](const auto& m) { return m.predict(query); }, model);
}

}  // namespace dirtybench
