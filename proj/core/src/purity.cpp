#include <algorithm>
#include <cmath>
#include <numeric>

#include "dirtybench/classify.hpp"
#include "dirtybench/error.hpp"

namespace dirtybench {

namespace {

std::size_t total_of(std::span<const std::size_t> counts) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total == 0) throw Error(ErrorCode::undefined_node, "class counts sum to zero");
  return total;
}

}  // namespace

double gini(std::span<const std::size_t> counts) {
  const double n = static_cast<double>(total_of(counts));
  double sum_sq = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / n;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double entropy(std::span<const std::size_t> counts) {
  const double n = static_cast<double>(total_of(counts));
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double misclassification_error(std::span<const std::size_t> counts) {
  const double n = static_cast<double>(total_of(counts));
  return 1.0 - static_cast<double>(*std::max_element(counts.begin(), counts.end())) / n;
}

double information_gain(std::span<const std::size_t> parent,
                        std::span<const std::vector<std::size_t>> partitions) {
  const std::size_t n = total_of(parent);
  std::vector<std::size_t> covered(parent.size(), 0);
  double weighted = 0.0;
  for (const auto& part : partitions) {
    if (part.size() != parent.size()) throw Error(ErrorCode::parameter, "partition has a different class count");
    const std::size_t m = std::accumulate(part.begin(), part.end(), std::size_t{0});
    for (std::size_t i = 0; i < part.size(); ++i) covered[i] += part[i];
    if (m == 0) continue;
    weighted += static_cast<double>(m) / static_cast<double>(n) * entropy(part);
  }
  if (!std::equal(covered.begin(), covered.end(), parent.begin())) {
    throw Error(ErrorCode::parameter, "partitions do not cover the parent node");
  }
  return entropy(parent) - weighted;
}

}  // namespace dirtybench
