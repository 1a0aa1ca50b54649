#include <algorithm>
#include <utility>

#include "dirtybench/classify.hpp"
#include "dirtybench/error.hpp"

namespace dirtybench {

KnnModel KnnModel::fit(const Dataset& train, std::size_t k) {
  if (train.size() == 0) throw Error(ErrorCode::empty_input, "training set is empty");
  if (k == 0) throw Error(ErrorCode::parameter, "k must be positive");
  if (k > train.size()) {
    throw Error(ErrorCode::parameter,
                "k=" + std::to_string(k) + " exceeds the " + std::to_string(train.size()) + " training rows");
  }
  KnnModel m;
  m.encoder_ = FeatureEncoder::fit(train);
  m.points_ = m.encoder_.encode_all(train);
  m.labels_ = class_labels(train);
  m.k_ = k;
  m.n_classes_ = train.schema().class_count();
  return m;
}

std::vector<std::size_t> KnnModel::neighbors(const Record& query) const {
  const auto q = encoder_.encode(query);
  const std::size_t n = labels_.size();
  std::vector<std::pair<double, std::size_t>> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = {squared_distance(q, points_.row(i)), i};
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k_), d.end());
  std::vector<std::size_t> out(k_);
  for (std::size_t i = 0; i < k_; ++i) out[i] = d[i].second;
  return out;
}

int KnnModel::predict(const Record& query) const {
  std::vector<int> votes;
  for (std::size_t i : neighbors(query)) votes.push_back(labels_[i]);
  return majority_vote(votes, n_classes_);
}

int knn_classify(const Dataset& train, const Record& query, std::size_t k) {
  return KnnModel::fit(train, k).predict(query);
}

}  // namespace dirtybench
