#include <gtest/gtest.h>

#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "dirtybench/cluster.hpp"
#include "dirtybench/error.hpp"
#include "fixtures.hpp"

using namespace dirtybench;

namespace {

Points line(std::initializer_list<double> xs) {
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x});
  return Points::from_rows(rows);
}

/// Two tight 2-D blobs, centred at (0,0) and (10,10).
Points two_blobs(std::size_t per_blob, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      rows.push_back({10.0 * static_cast<double>(b) + rng.uniform01(), 10.0 * static_cast<double>(b) + rng.uniform01()});
    }
  }
  return Points::from_rows(rows);
}

std::vector<int> blob_truth(std::size_t per_blob) {
  std::vector<int> t(2 * per_blob, 0);
  std::fill(t.begin() + static_cast<std::ptrdiff_t>(per_blob), t.end(), 1);
  return t;
}

/// True when both labelings induce the same partition.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab.emplace(a[i], b[i]).first->second != b[i]) return false;
    if (ba.emplace(b[i], a[i]).first->second != a[i]) return false;
  }
  return true;
}

/// Minimum SSE over every assignment of points to k non-empty groups.
double brute_force_sse(const Points& p, std::size_t k) {
  const std::size_t n = p.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> a(n, 0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    std::set<int> used;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(c % k);
      c /= k;
      used.insert(a[i]);
    }
    if (used.size() != k) continue;
    Clustering cl{a, k};
    best = std::min(best, sse(p, cl, cluster_means(p, cl)));
  }
  return best;
}

}  // namespace

TEST(KMeans, FourPointLine) {
  const Points p = line({0, 1, 9, 10});
  const auto r = kmeans(p, {2, 1});
  EXPECT_EQ(r.clustering.assignments[0], r.clustering.assignments[1]);
  EXPECT_EQ(r.clustering.assignments[2], r.clustering.assignments[3]);
  EXPECT_NE(r.clustering.assignments[0], r.clustering.assignments[2]);
  std::vector<double> c{r.centroids.row(0)[0], r.centroids.row(1)[0]};
  std::sort(c.begin(), c.end());
  EXPECT_DOUBLE_EQ(c[0], 0.5);
  EXPECT_DOUBLE_EQ(c[1], 9.5);
  EXPECT_DOUBLE_EQ(r.sse, brute_force_sse(p, 2));
}

TEST(KMeans, MatchesBruteForceOnRandomLines) {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const Points p = line({rng.uniform01() * 10, rng.uniform01() * 10, rng.uniform01() * 10, rng.uniform01() * 10});
    for (std::size_t k : {1u, 2u, 3u}) {
      const auto r = kmeans(p, {k, static_cast<std::uint64_t>(t)});
      EXPECT_NEAR(r.sse, brute_force_sse(p, k), 1e-9);
    }
  }
}

TEST(KMeans, KEqualsRowsAndDeterminism) {
  const Points p = two_blobs(5, 2);
  const auto r = kmeans(p, {p.size(), 3});
  EXPECT_EQ(r.sse, 0.0);
  std::set<int> ids(r.clustering.assignments.begin(), r.clustering.assignments.end());
  EXPECT_EQ(ids.size(), p.size());
  EXPECT_EQ(kmeans(p, {2, 9}).clustering, kmeans(p, {2, 9}).clustering);
  EXPECT_THROW(kmeans(p, {0, 1}), Error);
}

TEST(KMeans, SseNonIncreasingPerIteration) {
  const Dataset d = dirtybench::testing::blobs(150, 4, 3, 11, 2.0);
  const Points p = clustering_points(d);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = kmeans(p, {3, seed});
    for (std::size_t i = 1; i < r.sse_trace.size(); ++i) EXPECT_LE(r.sse_trace[i], r.sse_trace[i - 1] + 1e-12);
  }
}

TEST(Lvq, ZeroLearningRateKeepsPrototypes) {
  const Points p = two_blobs(10, 4);
  const auto truth = blob_truth(10);
  LvqOptions o;
  o.learning_rate = 0.0;
  o.seed = 3;
  const auto r = lvq(p, truth, 2, o);
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < r.prototypes.size(); ++j) {
      if (squared_distance(p.row(i), r.prototypes.row(j)) < squared_distance(p.row(i), r.prototypes.row(best))) best = j;
    }
    EXPECT_EQ(r.clustering.assignments[i], static_cast<int>(best));
  }
  // Initial prototypes are data rows.
  for (std::size_t j = 0; j < r.prototypes.size(); ++j) {
    bool found = false;
    for (std::size_t i = 0; i < p.size(); ++i) found = found || squared_distance(p.row(i), r.prototypes.row(j)) == 0.0;
    EXPECT_TRUE(found);
  }
}

TEST(Lvq, SeparatedBlobsMatchLabels) {
  const Points p = two_blobs(20, 5);
  const auto truth = blob_truth(20);
  const auto r = lvq(p, truth, 2, {0, 0.05, 500, 7});
  EXPECT_TRUE(same_partition(r.clustering.assignments, truth));
  EXPECT_EQ(lvq(p, truth, 2, {0, 0.05, 500, 7}).clustering, r.clustering);
  EXPECT_THROW(lvq(p, truth, 2, {1, 0.05, 10, 1}), Error);
}

TEST(Clarans, ExhaustiveOnFourPoints) {
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 4; ++i) rows.push_back({rng.uniform01(), rng.uniform01()});
    const Points p = Points::from_rows(rows);
    for (std::size_t k : {1u, 2u, 3u}) {
      double best = std::numeric_limits<double>::infinity();
      std::vector<std::size_t> idx(4);
      std::iota(idx.begin(), idx.end(), 0);
      for (unsigned mask = 0; mask < 16; ++mask) {
        std::vector<std::size_t> m;
        for (std::size_t i = 0; i < 4; ++i) {
          if (mask & (1u << i)) m.push_back(i);
        }
        if (m.size() == k) best = std::min(best, medoid_cost(p, m));
      }
      ClaransOptions o;
      o.k = k;
      o.num_local = 6;
      o.seed = static_cast<std::uint64_t>(t);
      EXPECT_NEAR(clarans(p, o).cost, best, 1e-12);
    }
  }
}

TEST(Clarans, CostNeverIncreasesAndFullK) {
  const Points p = two_blobs(15, 8);
  const auto r = clarans(p, {2, 3, 0, 4});
  for (const auto& trace : r.cost_traces) {
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LT(trace[i], trace[i - 1]);
  }
  EXPECT_TRUE(same_partition(r.clustering.assignments, blob_truth(15)));
  EXPECT_EQ(clarans(p, {p.size(), 1, 0, 1}).cost, 0.0);
}

TEST(Dbscan, TwoBlobsAreComponents) {
  const Points p = two_blobs(12, 9);
  const auto r = dbscan(p, {2.0, 3});
  EXPECT_EQ(r.clustering.n_clusters, 2u);
  EXPECT_EQ(r.clustering.noise_count(), 0u);
  EXPECT_TRUE(same_partition(r.clustering.assignments, blob_truth(12)));
}

TEST(Dbscan, TinyEpsIsAllNoise) {
  const Points p = two_blobs(6, 1);
  const auto r = dbscan(p, {1e-6, 2});
  EXPECT_EQ(r.clustering.noise_count(), p.size());
  EXPECT_EQ(r.clustering.n_clusters, 0u);
}

TEST(Dbscan, PermutationInvariantCoreSet) {
  const Dataset d = dirtybench::testing::blobs(80, 2, 3, 3, 1.5);
  const Points p = clustering_points(d);
  const double eps = default_dbscan_eps(p, 4);
  EXPECT_GT(eps, 0.0);
  const auto base = dbscan(p, {eps, 4});
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Points q(p.size(), p.dim);
    for (std::size_t i = 0; i < p.size(); ++i) std::copy(p.row(perm[i]).begin(), p.row(perm[i]).end(), q.row(i).begin());
    const auto r = dbscan(q, {eps, 4});
    EXPECT_EQ(r.clustering.n_clusters, base.clustering.n_clusters);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(r.core[i], base.core[perm[i]]);
  }
}

TEST(Birch, ClusterFeatureAdditivity) {
  const auto a = ClusterFeature::of(std::vector<double>{1, 2});
  const auto b = ClusterFeature::of(std::vector<double>{3, -1});
  const auto s = a + b;
  EXPECT_EQ(s.n, 2u);
  EXPECT_EQ(s.ls, (std::vector<double>{4, 1}));
  EXPECT_EQ(s.ss, (std::vector<double>{10, 5}));
  EXPECT_EQ(s.centroid(), (std::vector<double>{2, 0.5}));
}

TEST(Birch, HugeThresholdSingleEntry) {
  const Points p = two_blobs(10, 3);
  const auto r = birch(p, {10, 1e9, 1});
  EXPECT_EQ(r.leaf_entries.size(), 1u);
  for (int a : r.clustering.assignments) EXPECT_EQ(a, 0);
  EXPECT_THROW(birch(p, {10, 1e9, 2}), Error);
}

TEST(Birch, SquareSumsConsistentAndBlobsMatchKMeans) {
  const Points p = two_blobs(40, 12);
  const auto r = birch(p, {3, 0.5, 2});
  for (const auto& e : r.all_entries) {
    for (std::size_t j = 0; j < e.ls.size(); ++j) {
      EXPECT_GE(e.ss[j] + 1e-9, e.ls[j] * e.ls[j] / static_cast<double>(e.n));
    }
  }
  const auto km = kmeans(p, {2, 1});
  EXPECT_TRUE(same_partition(r.clustering.assignments, km.clustering.assignments));
}

TEST(Cure, FullShrinkIsCentroidRule) {
  const Dataset d = dirtybench::testing::blobs(90, 2, 3, 21, 1.0);
  const Points p = clustering_points(d);
  CureOptions o;
  o.k = 3;
  o.n_rep = 1;
  o.shrink = 1.0;
  o.sample_fraction = 0.5;
  o.seed = 5;
  const auto r = cure(p, o);
  // Independent recomputation: single linkage on the sample, centroids,
  // nearest-centroid assignment of every row.
  Points sample(r.sample.size(), p.dim);
  for (std::size_t i = 0; i < r.sample.size(); ++i) {
    std::copy(p.row(r.sample[i]).begin(), p.row(r.sample[i]).end(), sample.row(i).begin());
  }
  const Clustering sl = single_linkage(sample, 3);
  const Points centroids = cluster_means(sample, sl);
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < 3; ++c) {
      if (squared_distance(p.row(i), centroids.row(c)) < squared_distance(p.row(i), centroids.row(best))) best = c;
    }
    EXPECT_EQ(r.clustering.assignments[i], static_cast<int>(best));
  }
}

TEST(Cure, SeededAndValidated) {
  const Points p = two_blobs(20, 2);
  EXPECT_EQ(cure(p, {2, 3, 0.3, 0.5, 1}).clustering, cure(p, {2, 3, 0.3, 0.5, 1}).clustering);
  EXPECT_THROW(cure(p, {2, 3, 0.3, 0.01, 1}), Error);
  EXPECT_THROW(cure(p, {2, 3, 0.0, 0.5, 1}), Error);
  EXPECT_TRUE(same_partition(cure(p, {2, 3, 0.3, 0.5, 1}).clustering.assignments, blob_truth(20)));
}

TEST(Clustering, CoversAllRows) {
  const Dataset d = dirtybench::testing::blobs(60, 3, 3, 14, 1.0);
  const Points p = clustering_points(d);
  const auto labels = class_labels(d);
  std::vector<Clustering> all{kmeans(p, {3, 1}).clustering, lvq(p, labels, 3, {}).clustering,
                              clarans(p, {3, 2, 0, 1}).clustering, dbscan(p, {default_dbscan_eps(p), 4}).clustering,
                              birch(p, {10, 0.1, 3}).clustering, cure(p, {3, 5, 0.3, 0.25, 1}).clustering};
  for (const auto& c : all) {
    EXPECT_EQ(c.assignments.size(), p.size());
    EXPECT_NO_THROW(c.validate());
  }
  EXPECT_EQ(to_delimited(Clustering{{0, -1}, 1}), "row,cluster\n0,0\n1,-1\n");
}
