#include <algorithm>
#include <cmath>
#include <limits>

#include "dirtybench/cluster.hpp"
#include "dirtybench/error.hpp"

namespace dirtybench {

ClusterFeature ClusterFeature::of(std::span<const double> point) {
  ClusterFeature cf;
  cf.n = 1;
  cf.ls.assign(point.begin(), point.end());
  cf.ss.resize(point.size());
  for (std::size_t j = 0; j < point.size(); ++j) cf.ss[j] = point[j] * point[j];
  return cf;
}

ClusterFeature& ClusterFeature::operator+=(const ClusterFeature& other) {
  if (n == 0) return *this = other;
  if (other.n == 0) return *this;
  if (ls.size() != other.ls.size()) throw Error(ErrorCode::parameter, "clustering features differ in dimension");
  n += other.n;
  for (std::size_t j = 0; j < ls.size(); ++j) {
    ls[j] += other.ls[j];
    ss[j] += other.ss[j];
  }
  return *this;
}

ClusterFeature operator+(ClusterFeature a, const ClusterFeature& b) { return a += b; }

std::vector<double> ClusterFeature::centroid() const {
  std::vector<double> c(ls.size(), 0.0);
  if (n == 0) return c;
  for (std::size_t j = 0; j < ls.size(); ++j) c[j] = ls[j] / static_cast<double>(n);
  return c;
}

double ClusterFeature::radius() const {
  if (n == 0) return 0.0;
  const double m = static_cast<double>(n);
  double r2 = 0.0;
  for (std::size_t j = 0; j < ls.size(); ++j) {
    const double mean = ls[j] / m;
    r2 += ss[j] / m - mean * mean;
  }
  return std::sqrt(std::max(r2, 0.0));
}

namespace {

struct Node {
  bool leaf = true;
  std::vector<ClusterFeature> entries;
  std::vector<std::size_t> children;
};

class CfTree {
 public:
  CfTree(std::size_t branching, double threshold) : branching_(branching), threshold_(threshold) {
    nodes_.emplace_back();
  }

  void insert(std::span<const double> x) {
    const ClusterFeature point = ClusterFeature::of(x);
    std::size_t sibling = 0;
    if (insert_into(root_, point, sibling)) {
      Node root;
      root.leaf = false;
      root.entries = {summary(root_), summary(sibling)};
      root.children = {root_, sibling};
      nodes_.push_back(std::move(root));
      root_ = nodes_.size() - 1;
    }
  }

  std::vector<ClusterFeature> leaf_entries() const {
    std::vector<ClusterFeature> out;
    collect(root_, out, true);
    return out;
  }

  std::vector<ClusterFeature> all_entries() const {
    std::vector<ClusterFeature> out;
    collect(root_, out, false);
    return out;
  }

 private:
  ClusterFeature summary(std::size_t node) const {
    ClusterFeature s;
    for (const auto& e : nodes_[node].entries) s += e;
    return s;
  }

  static std::size_t closest(const std::vector<ClusterFeature>& entries, std::span<const double> x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const double d = squared_distance(entries[i].centroid(), x);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  bool insert_into(std::size_t node, const ClusterFeature& point, std::size_t& sibling) {
    if (nodes_[node].leaf) {
      auto& entries = nodes_[node].entries;
      if (!entries.empty()) {
        const std::size_t i = closest(entries, point.ls);
        const ClusterFeature merged = entries[i] + point;
        if (merged.radius() <= threshold_) {
          entries[i] = merged;
          return false;
        }
      }
      entries.push_back(point);
    } else {
      const std::size_t i = closest(nodes_[node].entries, point.ls);
      const std::size_t child = nodes_[node].children[i];
      std::size_t child_sibling = 0;
      if (insert_into(child, point, child_sibling)) {
        Node& n = nodes_[node];
        n.entries[i] = summary(child);
        n.entries.insert(n.entries.begin() + static_cast<std::ptrdiff_t>(i) + 1, summary(child_sibling));
        n.children.insert(n.children.begin() + static_cast<std::ptrdiff_t>(i) + 1, child_sibling);
      } else {
        nodes_[node].entries[i] += point;
      }
    }
    if (nodes_[node].entries.size() <= branching_) return false;
    sibling = split(node);
    return true;
  }

  /// Splits around the farthest pair of entry centroids; returns the new node.
  std::size_t split(std::size_t node) {
    Node old = std::move(nodes_[node]);
    const std::size_t m = old.entries.size();
    std::vector<std::vector<double>> centres(m);
    for (std::size_t i = 0; i < m; ++i) centres[i] = old.entries[i].centroid();
    std::size_t sa = 0;
    std::size_t sb = 1;
    double far = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double d = squared_distance(centres[i], centres[j]);
        if (d > far) {
          far = d;
          sa = i;
          sb = j;
        }
      }
    }
    Node a;
    Node b;
    a.leaf = b.leaf = old.leaf;
    for (std::size_t i = 0; i < m; ++i) {
      const bool to_a = i == sa || (i != sb && squared_distance(centres[i], centres[sa]) <=
                                                   squared_distance(centres[i], centres[sb]));
      Node& dst = to_a ? a : b;
      dst.entries.push_back(old.entries[i]);
      if (!old.leaf) dst.children.push_back(old.children[i]);
    }
    nodes_[node] = std::move(a);
    nodes_.push_back(std::move(b));
    return nodes_.size() - 1;
  }

  void collect(std::size_t node, std::vector<ClusterFeature>& out, bool leaves_only) const {
    const Node& n = nodes_[node];
    if (n.leaf || !leaves_only) out.insert(out.end(), n.entries.begin(), n.entries.end());
    if (!n.leaf) {
      for (std::size_t c : n.children) collect(c, out, leaves_only);
    }
  }

  std::size_t branching_;
  double threshold_;
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

}  // namespace

BirchResult birch(const Points& points, const BirchOptions& options) {
  if (points.size() == 0) throw Error(ErrorCode::empty_input, "no points to cluster");
  if (!(options.threshold > 0.0)) throw Error(ErrorCode::parameter, "threshold must be positive");
  if (options.branching < 2) throw Error(ErrorCode::parameter, "branching factor must be at least 2");
  if (options.k == 0) throw Error(ErrorCode::parameter, "K must be positive");

  CfTree tree(options.branching, options.threshold);
  for (std::size_t i = 0; i < points.size(); ++i) tree.insert(points.row(i));

  BirchResult r;
  r.leaf_entries = tree.leaf_entries();
  r.all_entries = tree.all_entries();
  if (options.k > r.leaf_entries.size()) {
    throw Error(ErrorCode::parameter, "K=" + std::to_string(options.k) + " exceeds the " +
                                          std::to_string(r.leaf_entries.size()) + " leaf entries");
  }
  std::vector<std::vector<double>> centres;
  for (const auto& e : r.leaf_entries) centres.push_back(e.centroid());
  const Clustering groups = single_linkage(Points::from_rows(centres), options.k);

  std::vector<ClusterFeature> merged(groups.n_clusters);
  for (std::size_t e = 0; e < r.leaf_entries.size(); ++e) {
    merged[static_cast<std::size_t>(groups.assignments[e])] += r.leaf_entries[e];
  }
  std::vector<std::vector<double>> final_centres;
  for (const auto& cf : merged) final_centres.push_back(cf.centroid());
  r.centroids = Points::from_rows(final_centres);

  r.clustering.n_clusters = groups.n_clusters;
  r.clustering.assignments.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < r.centroids.size(); ++c) {
      const double d = squared_distance(points.row(i), r.centroids.row(c));
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    r.clustering.assignments[i] = static_cast<int>(best);
  }
  return r;
}

}  // namespace dirtybench
