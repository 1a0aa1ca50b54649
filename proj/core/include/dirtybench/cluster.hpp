#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dirtybench/dataset.hpp"
#include "dirtybench/features.hpp"

namespace dirtybench {

inline constexpr int kNoise = -1;

/// Cluster index per row, or kNoise.
struct Clustering {
  std::vector<int> assignments;
  std::size_t n_clusters = 0;

  std::size_t noise_count() const;
  /// Throws a parameter error when an assignment is out of range.
  void validate() const;
  bool operator==(const Clustering&) const = default;
};

/// Two columns, `row,cluster`, noise written as -1.
std::string to_delimited(const Clustering& clustering);
void save_clustering(const Clustering& clustering, const std::filesystem::path& path);

/// Imputes a copy of `dataset` with its own statistics and encodes the
/// features the same way KNN does.
Points clustering_points(const Dataset& dataset);

double sse(const Points& points, const Clustering& clustering, const Points& centroids);
/// Mean of each cluster's points; clusters without points get a zero row.
Points cluster_means(const Points& points, const Clustering& clustering);

/// Single-linkage (MIN) agglomeration to k clusters, computed as a cut of the
/// minimum spanning tree. Clusters are numbered by their lowest point index.
Clustering single_linkage(const Points& points, std::size_t k);

// ---------------------------------------------------------------------------

struct KMeansOptions {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t max_iters = 100;
  /// Number of initial centroid sets tried. When the number of distinct
  /// k-row subsets is not larger, every subset is tried instead.
  std::size_t n_init = 10;
};

struct KMeansResult {
  Clustering clustering;
  Points centroids;
  double sse = 0.0;
  /// SSE after each assignment step of the winning run.
  std::vector<double> sse_trace;
};

KMeansResult kmeans(const Points& points, const KMeansOptions& options);

struct LvqOptions {
  std::size_t prototypes = 0;  // 0 selects the class count
  double learning_rate = 0.05;
  std::size_t iterations = 2000;
  std::uint64_t seed = 0;
};

struct LvqResult {
  Clustering clustering;
  Points prototypes;
  std::vector<int> prototype_labels;
};

LvqResult lvq(const Points& points, std::span<const int> labels, std::size_t n_classes, const LvqOptions& options);

struct ClaransOptions {
  std::size_t k = 2;
  std::size_t num_local = 2;
  /// 0 selects max(250, 1.25% of k(n-k)).
  std::size_t max_neighbor = 0;
  std::uint64_t seed = 0;
};

struct ClaransResult {
  Clustering clustering;
  std::vector<std::size_t> medoids;
  double cost = 0.0;
  /// Cost after every accepted swap, per local search in order.
  std::vector<std::vector<double>> cost_traces;
};

ClaransResult clarans(const Points& points, const ClaransOptions& options);
/// Sum of distances from each point to its nearest medoid.
double medoid_cost(const Points& points, std::span<const std::size_t> medoids);

struct DbscanOptions {
  double eps = 0.1;
  std::size_t min_pts = 4;
};

struct DbscanResult {
  Clustering clustering;
  std::vector<bool> core;
};

DbscanResult dbscan(const Points& points, const DbscanOptions& options);
/// 90th percentile (nearest rank) of each point's distance to its
/// min_pts-th nearest other point.
double default_dbscan_eps(const Points& points, std::size_t min_pts = 4);

/// Clustering feature: count, linear sum and per-component square sum.
struct ClusterFeature {
  std::size_t n = 0;
  std::vector<double> ls;
  std::vector<double> ss;

  static ClusterFeature of(std::span<const double> point);
  ClusterFeature& operator+=(const ClusterFeature& other);
  std::vector<double> centroid() const;
  /// Root-mean-square distance of the members from the centroid.
  double radius() const;
  bool operator==(const ClusterFeature&) const = default;
};

ClusterFeature operator+(ClusterFeature a, const ClusterFeature& b);

struct BirchOptions {
  std::size_t branching = 10;
  double threshold = 0.1;
  std::size_t k = 2;
};

struct BirchResult {
  Clustering clustering;
  std::vector<ClusterFeature> leaf_entries;
  /// Every entry of every node, leaves included.
  std::vector<ClusterFeature> all_entries;
  Points centroids;
};

BirchResult birch(const Points& points, const BirchOptions& options);

struct CureOptions {
  std::size_t k = 2;
  std::size_t n_rep = 5;
  double shrink = 0.3;
  double sample_fraction = 0.25;
  std::uint64_t seed = 0;
};

struct CureResult {
  Clustering clustering;
  std::vector<std::size_t> sample;
  /// Shrunk representatives and the cluster each belongs to.
  Points representatives;
  std::vector<int> representative_cluster;
};

CureResult cure(const Points& points, const CureOptions& options);

}  // namespace dirtybench
