#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dirtybench/classify.hpp"
#include "dirtybench/random.hpp"

namespace dirtybench::detail {

/// Column-major copy of a training set for split search.
struct TreeTrainingData {
  std::vector<std::size_t> columns;
  std::vector<bool> categorical;
  std::vector<std::vector<double>> numeric;
  std::vector<std::vector<int>> codes;
  std::vector<std::vector<std::string>> categories;
  std::vector<int> labels;
  std::size_t n_classes = 0;

  static TreeTrainingData from(const Dataset& train);
};

/// Grows one tree over `rows` (repeats allowed). When `features_per_split`
/// is below the feature count, each node draws that many features from
/// `rng`; otherwise all features are scanned in schema order.
DecisionTree grow_tree(const TreeTrainingData& data, const std::vector<std::size_t>& rows,
                       SplitCriterion criterion, TreeLimits limits, std::size_t features_per_split, Rng* rng);

}  // namespace dirtybench::detail
