#include "dirtybench/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "dirtybench/corruption.hpp"
#include "dirtybench/error.hpp"
#include "dirtybench/random.hpp"

namespace dirtybench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_points(const Points& points) {
  if (points.size() == 0) throw Error(ErrorCode::empty_input, "no points to cluster");
}

void require_k(std::size_t k, std::size_t n) {
  if (k == 0) throw Error(ErrorCode::parameter, "K must be positive");
  if (k > n) {
    throw Error(ErrorCode::parameter, "K=" + std::to_string(k) + " exceeds the " + std::to_string(n) + " rows");
  }
}

/// Index of the nearest centre; ties go to the lower index.
std::size_t nearest(std::span<const double> x, const Points& centres, double* dist_sq = nullptr) {
  std::size_t best = 0;
  double best_d = kInf;
  for (std::size_t c = 0; c < centres.size(); ++c) {
    const double d = squared_distance(x, centres.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist_sq) *dist_sq = best_d;
  return best;
}

/// C(n, k) saturated at `cap`.
std::size_t choose_capped(std::size_t n, std::size_t k, std::size_t cap) {
  long double c = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(std::llround(c));
}

/// Every k-subset of [0, n) in lexicographic order.
std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (;;) {
    out.push_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

/// Starting index sets: all subsets when there are at most `tries`, else
/// `tries` random draws.
std::vector<std::vector<std::size_t>> starting_sets(std::size_t n, std::size_t k, std::size_t tries, Rng& rng) {
  if (choose_capped(n, k, tries) <= tries) return all_subsets(n, k);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t t = 0; t < tries; ++t) out.push_back(rng.sample(n, k));
  return out;
}

Points rows_of(const Points& points, std::span<const std::size_t> idx) {
  Points out(idx.size(), points.dim);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy_n(points.row(idx[i]).begin(), points.dim, out.row(i).begin());
  }
  return out;
}

}  // namespace

std::size_t Clustering::noise_count() const {
  return static_cast<std::size_t>(std::count(assignments.begin(), assignments.end(), kNoise));
}

void Clustering::validate() const {
  for (int a : assignments) {
    if (a != kNoise && (a < 0 || static_cast<std::size_t>(a) >= n_clusters)) {
      throw Error(ErrorCode::parameter, "cluster index " + std::to_string(a) + " out of range");
    }
  }
}

std::string to_delimited(const Clustering& clustering) {
  std::ostringstream out;
  out << "row,cluster\n";
  for (std::size_t i = 0; i < clustering.assignments.size(); ++i) out << i << ',' << clustering.assignments[i] << '\n';
  return out.str();
}

void save_clustering(const Clustering& clustering, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << to_delimited(clustering);
}

Points clustering_points(const Dataset& dataset) {
  const Dataset filled = impute(dataset);
  return FeatureEncoder::fit(filled).encode_all(filled);
}

Points cluster_means(const Points& points, const Clustering& clustering) {
  Points means(clustering.n_clusters, points.dim);
  std::vector<std::size_t> counts(clustering.n_clusters, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int a = clustering.assignments[i];
    if (a == kNoise) continue;
    auto m = means.row(static_cast<std::size_t>(a));
    const auto x = points.row(i);
    for (std::size_t j = 0; j < points.dim; ++j) m[j] += x[j];
    ++counts[static_cast<std::size_t>(a)];
  }
  for (std::size_t c = 0; c < clustering.n_clusters; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : means.row(c)) v /= static_cast<double>(counts[c]);
  }
  return means;
}

double sse(const Points& points, const Clustering& clustering, const Points& centroids) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int a = clustering.assignments[i];
    if (a == kNoise) continue;
    s += squared_distance(points.row(i), centroids.row(static_cast<std::size_t>(a)));
  }
  return s;
}

Clustering single_linkage(const Points& points, std::size_t k) {
  require_points(points);
  const std::size_t n = points.size();
  require_k(k, n);
  // Prim's algorithm; edge i joins point i to parent[i].
  std::vector<double> best(n, kInf);
  std::vector<std::size_t> parent(n, 0);
  std::vector<char> in_tree(n, 0);
  struct Edge {
    double w;
    std::size_t order;
    std::size_t a;
    std::size_t b;
  };
  std::vector<Edge> edges;
  std::size_t current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double d = squared_distance(points.row(current), points.row(j));
      if (d < best[j]) {
        best[j] = d;
        parent[j] = current;
      }
    }
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_tree[j] && (next == n || best[j] < best[next])) next = j;
    }
    in_tree[next] = 1;
    edges.push_back({best[next], step, parent[next], next});
    current = next;
  }
  // Drop the k-1 heaviest edges; among equal weights the later-added edge goes first.
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.w != y.w ? x.w > y.w : x.order > y.order;
  });
  std::vector<std::size_t> uf(n);
  std::iota(uf.begin(), uf.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (std::size_t e = k - 1; e < edges.size(); ++e) {
    const std::size_t ra = find(edges[e].a);
    const std::size_t rb = find(edges[e].b);
    if (ra != rb) uf[std::max(ra, rb)] = std::min(ra, rb);
  }
  Clustering c;
  c.assignments.assign(n, kNoise);
  std::vector<int> label_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (label_of_root[r] < 0) label_of_root[r] = static_cast<int>(c.n_clusters++);
    c.assignments[i] = label_of_root[r];
  }
  return c;
}

// ---------------------------------------------------------------------------
// k-means

namespace {

KMeansResult lloyd(const Points& points, Points centroids, std::size_t max_iters) {
  const std::size_t n = points.size();
  const std::size_t k = centroids.size();
  KMeansResult r;
  r.clustering.n_clusters = k;
  r.clustering.assignments.assign(n, -2);
  for (std::size_t iter = 0; iter < std::max<std::size_t>(max_iters, 1); ++iter) {
    bool changed = false;
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int a = static_cast<int>(nearest(points.row(i), centroids, &dist[i]));
      if (a != r.clustering.assignments[i]) changed = true;
      r.clustering.assignments[i] = a;
    }
    r.sse_trace.push_back(std::accumulate(dist.begin(), dist.end(), 0.0));
    if (!changed) break;
    std::vector<std::size_t> counts(k, 0);
    for (int a : r.clustering.assignments) ++counts[static_cast<std::size_t>(a)];
    Points next = cluster_means(points, r.clustering);
    std::vector<char> taken(n, 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      // Re-seed an empty cluster with the point farthest from its centroid.
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) continue;
      taken[far] = 1;
      dist[far] = 0.0;
      std::copy_n(points.row(far).begin(), points.dim, next.row(c).begin());
    }
    centroids = std::move(next);
  }
  r.centroids = std::move(centroids);
  r.sse = r.sse_trace.back();
  return r;
}

}  // namespace

KMeansResult kmeans(const Points& points, const KMeansOptions& options) {
  require_points(points);
  require_k(options.k, points.size());
  Rng rng(options.seed);
  KMeansResult best;
  bool have = false;
  for (const auto& init : starting_sets(points.size(), options.k, std::max<std::size_t>(options.n_init, 1), rng)) {
    KMeansResult r = lloyd(points, rows_of(points, init), options.max_iters);
    if (!have || r.sse < best.sse) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// LVQ

LvqResult lvq(const Points& points, std::span<const int> labels, std::size_t n_classes, const LvqOptions& options) {
  require_points(points);
  if (labels.size() != points.size()) throw Error(ErrorCode::parameter, "label count does not match the point count");
  if (n_classes == 0) throw Error(ErrorCode::parameter, "LVQ needs labelled data");
  const std::size_t q = options.prototypes == 0 ? n_classes : options.prototypes;
  if (q < n_classes) {
    throw Error(ErrorCode::parameter, "prototype count " + std::to_string(q) + " is below the class count " +
                                          std::to_string(n_classes));
  }
  const std::size_t n = points.size();
  Rng rng(options.seed);
  LvqResult r;
  r.prototypes = Points(q, points.dim);
  std::vector<std::vector<std::size_t>> by_label(n_classes);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < n_classes) {
      by_label[static_cast<std::size_t>(labels[i])].push_back(i);
    }
  }
  for (std::size_t p = 0; p < q; ++p) {
    std::size_t row = 0;
    int label = 0;
    if (p < n_classes) {
      label = static_cast<int>(p);
      const auto& pool = by_label[p];
      row = pool.empty() ? rng.uniform_index(n) : pool[rng.uniform_index(pool.size())];
    } else {
      row = rng.uniform_index(n);
      label = labels[row];
    }
    std::copy_n(points.row(row).begin(), points.dim, r.prototypes.row(p).begin());
    r.prototype_labels.push_back(label);
  }
  for (std::size_t t = 0; t < options.iterations; ++t) {
    const std::size_t i = rng.uniform_index(n);
    const auto x = points.row(i);
    const std::size_t p = nearest(x, r.prototypes);
    const double step = r.prototype_labels[p] == labels[i] ? options.learning_rate : -options.learning_rate;
    auto proto = r.prototypes.row(p);
    for (std::size_t j = 0; j < points.dim; ++j) proto[j] += step * (x[j] - proto[j]);
  }
  r.clustering.n_clusters = q;
  r.clustering.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.clustering.assignments[i] = static_cast<int>(nearest(points.row(i), r.prototypes));
  return r;
}

// ---------------------------------------------------------------------------
// CLARANS

double medoid_cost(const Points& points, std::span<const std::size_t> medoids) {
  double cost = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = kInf;
    for (std::size_t m : medoids) best = std::min(best, distance(points.row(i), points.row(m)));
    cost += best;
  }
  return cost;
}

ClaransResult clarans(const Points& points, const ClaransOptions& options) {
  require_points(points);
  const std::size_t n = points.size();
  const std::size_t k = options.k;
  require_k(k, n);
  std::size_t max_neighbor = options.max_neighbor;
  if (max_neighbor == 0) {
    max_neighbor = std::max<std::size_t>(250, static_cast<std::size_t>(0.0125 * static_cast<double>(k * (n - k))));
  }
  Rng rng(options.seed);
  ClaransResult best;
  best.cost = kInf;
  for (auto current : starting_sets(n, k, std::max<std::size_t>(options.num_local, 1), rng)) {
    double cost = medoid_cost(points, current);
    std::vector<double> trace{cost};
    if (k < n) {
      std::size_t j = 1;
      while (j <= max_neighbor) {
        const std::size_t slot = rng.uniform_index(k);
        std::size_t candidate = rng.uniform_index(n - k);
        // Map candidate to the candidate-th non-medoid row.
        std::vector<std::size_t> sorted = current;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t m : sorted) {
          if (m <= candidate) ++candidate;
        }
        auto next = current;
        next[slot] = candidate;
        const double c = medoid_cost(points, next);
        if (c < cost) {
          current = std::move(next);
          cost = c;
          trace.push_back(cost);
          j = 1;
        } else {
          ++j;
        }
      }
    }
    best.cost_traces.push_back(std::move(trace));
    if (cost < best.cost) {
      best.cost = cost;
      best.medoids = current;
    }
  }
  best.clustering.n_clusters = k;
  best.clustering.assignments.resize(n);
  const Points medoid_points = rows_of(points, best.medoids);
  for (std::size_t i = 0; i < n; ++i) {
    best.clustering.assignments[i] = static_cast<int>(nearest(points.row(i), medoid_points));
  }
  return best;
}

// ---------------------------------------------------------------------------
// DBSCAN

DbscanResult dbscan(const Points& points, const DbscanOptions& options) {
  if (!(options.eps > 0.0)) throw Error(ErrorCode::parameter, "eps must be positive");
  if (options.min_pts == 0) throw Error(ErrorCode::parameter, "min_pts must be at least 1");
  const std::size_t n = points.size();
  const double eps_sq = options.eps * options.eps;
  std::vector<std::vector<std::size_t>> neighbours(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (squared_distance(points.row(i), points.row(j)) <= eps_sq) neighbours[i].push_back(j);
    }
  }
  DbscanResult r;
  r.core.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) r.core[i] = neighbours[i].size() >= options.min_pts;
  r.clustering.assignments.assign(n, kNoise);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!r.core[i] || r.clustering.assignments[i] != kNoise) continue;
    const int label = next++;
    std::vector<std::size_t> stack{i};
    r.clustering.assignments[i] = label;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for (std::size_t q : neighbours[p]) {
        if (r.core[q] && r.clustering.assignments[q] == kNoise) {
          r.clustering.assignments[q] = label;
          stack.push_back(q);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (r.core[i]) continue;
    int label = kNoise;
    for (std::size_t q : neighbours[i]) {
      if (r.core[q] && (label == kNoise || r.clustering.assignments[q] < label)) label = r.clustering.assignments[q];
    }
    r.clustering.assignments[i] = label;
  }
  r.clustering.n_clusters = static_cast<std::size_t>(next);
  return r;
}

double default_dbscan_eps(const Points& points, std::size_t min_pts) {
  const std::size_t n = points.size();
  if (n < 2) return 1.0;
  const std::size_t rank = std::clamp<std::size_t>(min_pts, 1, n - 1);
  std::vector<double> kth(n);
  std::vector<double> d;
  for (std::size_t i = 0; i < n; ++i) {
    d.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d.push_back(distance(points.row(i), points.row(j)));
    }
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(rank - 1), d.end());
    kth[i] = d[rank - 1];
  }
  std::sort(kth.begin(), kth.end());
  const auto idx = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(n))) - 1;
  const double eps = kth[std::min(idx, n - 1)];
  return eps > 0.0 ? eps : 1e-9;
}

// ---------------------------------------------------------------------------
// CURE

CureResult cure(const Points& points, const CureOptions& options) {
  require_points(points);
  if (options.n_rep == 0) throw Error(ErrorCode::parameter, "n_rep must be at least 1");
  if (!(options.shrink > 0.0 && options.shrink <= 1.0)) throw Error(ErrorCode::parameter, "shrink must lie in (0, 1]");
  if (!(options.sample_fraction > 0.0 && options.sample_fraction <= 1.0)) {
    throw Error(ErrorCode::parameter, "sample_fraction must lie in (0, 1]");
  }
  if (options.k == 0) throw Error(ErrorCode::parameter, "K must be positive");
  const std::size_t n = points.size();
  const auto m = static_cast<std::size_t>(std::llround(options.sample_fraction * static_cast<double>(n)));
  if (m < options.k) {
    throw Error(ErrorCode::parameter, "sample of " + std::to_string(m) + " rows is smaller than K=" +
                                          std::to_string(options.k));
  }
  Rng rng(options.seed);
  CureResult r;
  r.sample = rng.sample(n, m);
  std::sort(r.sample.begin(), r.sample.end());
  const Points sample_points = rows_of(points, r.sample);
  const Clustering groups = single_linkage(sample_points, options.k);
  const Points centroids = cluster_means(sample_points, groups);

  std::vector<std::vector<double>> reps;
  for (std::size_t c = 0; c < groups.n_clusters; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < m; ++i) {
      if (groups.assignments[i] == static_cast<int>(c)) members.push_back(i);
    }
    const auto centre = centroids.row(c);
    std::vector<std::size_t> chosen;
    std::vector<double> gap(members.size(), kInf);
    for (std::size_t t = 0; t < std::min(options.n_rep, members.size()); ++t) {
      std::size_t pick = members.size();
      double pick_d = -1.0;
      for (std::size_t a = 0; a < members.size(); ++a) {
        const auto x = sample_points.row(members[a]);
        const double d = chosen.empty() ? squared_distance(x, centre) : gap[a];
        if (d > pick_d) {
          pick_d = d;
          pick = a;
        }
      }
      chosen.push_back(members[pick]);
      for (std::size_t a = 0; a < members.size(); ++a) {
        gap[a] = std::min(gap[a], squared_distance(sample_points.row(members[a]), sample_points.row(members[pick])));
      }
    }
    for (std::size_t s : chosen) {
      const auto x = sample_points.row(s);
      std::vector<double> rep(points.dim);
      for (std::size_t j = 0; j < points.dim; ++j) rep[j] = x[j] + options.shrink * (centre[j] - x[j]);
      reps.push_back(std::move(rep));
      r.representative_cluster.push_back(static_cast<int>(c));
    }
  }
  r.representatives = Points::from_rows(reps);
  r.clustering.n_clusters = groups.n_clusters;
  r.clustering.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.clustering.assignments[i] = r.representative_cluster[nearest(points.row(i), r.representatives)];
  }
  return r;
}

}  // namespace dirtybench
