#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "dirtybench/classify.hpp"
#include "dirtybench/cluster.hpp"
#include "dirtybench/corruption.hpp"
#include "dirtybench/evaluate.hpp"
#include "dirtybench/random.hpp"
#include "dirtybench/regress.hpp"
#include "dirtybench/report_io.hpp"
#include "dirtybench/robustness.hpp"

using namespace dirtybench;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

MetricSeries percent_series(std::vector<double> values) {
  MetricSeries s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.rates.push_back(0.1 * static_cast<double>(i));
    values[i] /= 100.0;
  }
  s.values = std::move(values);
  return s;
}

const std::vector<std::vector<double>> kExampleSeries{
    {78.37, 84.16, 78.08, 74.36, 64.99, 58.71}, {63.47, 62.93, 53.97, 50.93, 48.07, 34.5},
    {81.33, 60.93, 43.7, 42.87, 40.47, 35.47},  {82.17, 78.17, 76.53, 75.77, 75.9, 75.57},
    {80.5, 75.27, 71.3, 72.93, 71.53, 67.23}};

// ---------------------------------------------------------------------------

Outcome example_one() {
  Outcome o;
  const double expected[] = {31.24, 28.97, 45.86, 6.86, 16.53};
  std::vector<MetricSeries> series;
  for (const auto& v : kExampleSeries) series.push_back(percent_series(v));
  const auto start = Clock::now();
  std::vector<double> got;
  for (const auto& s : series) got.push_back(sensibility(s) * 100.0);
  const double elapsed = seconds_since(start);
  double sum = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    sum += got[i];
    if (std::abs(got[i] - expected[i]) > 0.005) o.fail("dataset " + std::to_string(i) + " gave " + fmt("%.4f", got[i]));
  }
  const double mean = sum / 5.0;
  if (std::abs(mean - 25.89) > 0.005) o.fail("mean " + fmt("%.4f", mean));
  if (elapsed >= 1e-3) o.fail("took " + fmt("%.6f", elapsed) + " s");
  if (o.pass) o.detail = "iris " + fmt("%.2f", got[0]) + "%, mean " + fmt("%.2f", mean) + "%, " + fmt("%.1f", elapsed * 1e6) + " us";
  return o;
}

Outcome example_two() {
  Outcome o;
  const double expected[] = {0.3, 0.2, 0.0, 0.5, 0.4};
  double sum = 0.0;
  std::string values;
  for (std::size_t i = 0; i < kExampleSeries.size(); ++i) {
    const double kp = keeping_point(percent_series(kExampleSeries[i]), 0.10);
    sum += kp;
    values += (i ? "/" : "") + fmt("%.0f", kp * 100.0);
    if (std::abs(kp - expected[i]) > 1e-12) o.fail("dataset " + std::to_string(i) + " gave " + fmt("%.4f", kp));
  }
  const double mean = sum / 5.0;
  if (std::abs(mean - 0.28) > 1e-12) o.fail("mean " + fmt("%.4f", mean));
  if (o.pass) o.detail = values + ", mean " + fmt("%.0f", mean * 100.0) + "%";
  return o;
}

// ---------------------------------------------------------------------------

/// 1000 rows in 250 entities of four: id -> name holds, value is numeric.
Dataset injection_table() {
  std::ostringstream s;
  s << "id,name,value,label\n";
  for (std::size_t i = 0; i < 1000; ++i) {
    s << "e" << i % 250 << ",n" << i % 250 << "," << format_number(static_cast<double>(i) * 0.25) << ","
      << (i % 3 == 0 ? "yes" : "no") << "\n";
  }
  return parse_dataset(s.str());
}

std::size_t missing_cells(const Dataset& d) {
  std::size_t n = 0;
  for (const auto& r : d.rows()) {
    for (const auto& c : r.cells) n += is_missing(c) ? 1 : 0;
  }
  return n;
}

Outcome injection_accuracy() {
  Outcome o;
  const Dataset clean = injection_table();
  const auto rules = parse_fd_rules("id -> name");
  const auto start = Clock::now();
  double worst = 0.0;
  std::size_t runs = 0;
  for (ErrorType type : {ErrorType::missing, ErrorType::inconsistent, ErrorType::conflicting}) {
    for (double rate : {0.1, 0.3, 0.5}) {
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        CorruptionSpec spec;
        spec.error_type = type;
        spec.rate = rate;
        spec.seed = seed;
        if (type == ErrorType::inconsistent) spec.rules = rules;
        if (type == ErrorType::conflicting) spec.entity_key = {"id", "name"};
        const Dataset dirty = inject(clean, spec);
        const auto summary = summarize_injection(clean, dirty, spec);
        const std::string tag = std::string(to_string(type)) + " " + fmt("%.1f", rate) + " seed " + std::to_string(seed);
        double achieved = summary.achieved_rate;
        if (type == ErrorType::missing) {
          // Recount against the three feature columns of 1000 rows.
          achieved = static_cast<double>(missing_cells(dirty)) / 3000.0;
          if (summary.denominator != 3000 || std::abs(achieved - summary.achieved_rate) > 1e-15) {
            o.fail(tag + ": summary disagrees with recount");
          }
        }
        const double gap = std::abs(achieved - rate);
        worst = std::max(worst, gap * static_cast<double>(summary.denominator));
        if (summary.denominator == 0 || gap > 1.0 / static_cast<double>(summary.denominator) + 1e-12) {
          o.fail(tag + ": achieved " + fmt("%.6f", achieved));
        }
        if (to_delimited(inject(clean, spec)) != to_delimited(dirty)) o.fail(tag + ": rerun differs");
        ++runs;
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) o.fail("took " + fmt("%.2f", elapsed) + " s");
  if (o.pass) {
    o.detail = std::to_string(runs) + " runs, worst gap " + fmt("%.2f", worst) + "/denominator, " + fmt("%.2f", elapsed) + " s";
  }
  return o;
}

// ---------------------------------------------------------------------------

Dataset points_table(const std::vector<std::vector<double>>& x, const std::vector<int>& labels) {
  std::ostringstream s;
  for (std::size_t j = 0; j < x.front().size(); ++j) s << "x" << j << ",";
  s << "label\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double v : x[i]) s << format_number(v) << ",";
    s << "c" << labels[i] << "\n";
  }
  LoadOptions lo;
  lo.categorical_target = true;
  return parse_dataset(s.str(), lo);
}

bool knn_matches_sort(Rng& rng, std::string& why) {
  const std::size_t n = 20, dim = 1 + rng.uniform_index(4), k = 1 + rng.uniform_index(n);
  std::vector<std::vector<double>> x(n, std::vector<double>(dim));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x[i]) v = std::round(rng.uniform01() * 1e6) / 1e3;
    labels[i] = static_cast<int>(rng.uniform_index(3));
  }
  const Dataset d = points_table(x, labels);
  std::vector<double> q(dim);
  for (double& v : q) v = std::round(rng.uniform01() * 1e6) / 1e3;
  Record query;
  for (double v : q) query.cells.emplace_back(v);
  query.cells.emplace_back(std::string("c0"));

  std::vector<double> lo(dim, std::numeric_limits<double>::infinity()), hi(dim, -lo[0]);
  for (const auto& r : x) {
    for (std::size_t j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], r[j]);
      hi[j] = std::max(hi[j], r[j]);
    }
  }
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double range = hi[j] - lo[j];
      const double a = range > 0 ? (x[i][j] - lo[j]) / range : 0.0;
      const double b = range > 0 ? (q[j] - lo[j]) / range : 0.0;
      s += (a - b) * (a - b);
    }
    order.emplace_back(s, i);
  }
  std::sort(order.begin(), order.end());

  const auto model = KnnModel::fit(d, k);
  const auto nn = model.neighbors(query);
  if (nn.size() != k) {
    why = "wrong neighbour count";
    return false;
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (nn[i] != order[i].second) {
      why = "neighbour " + std::to_string(i) + " differs";
      return false;
    }
  }
  // Class codes follow first appearance in the table.
  const auto codes = class_labels(d);
  std::vector<int> votes(3, 0);
  for (std::size_t i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(codes[order[i].second])];
  const int expected = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  if (model.predict(query) != expected) {
    why = "vote differs";
    return false;
  }
  return true;
}

double optimal_sse_1d(const std::vector<double>& v, std::size_t k) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t total = 1;
  for (std::size_t i = 0; i < v.size(); ++i) total *= k;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<double> sum(k, 0.0), sq(k, 0.0);
    std::vector<std::size_t> cnt(k, 0);
    std::size_t c = code;
    for (double x : v) {
      const std::size_t g = c % k;
      c /= k;
      sum[g] += x;
      sq[g] += x * x;
      ++cnt[g];
    }
    if (std::find(cnt.begin(), cnt.end(), 0u) != cnt.end()) continue;
    double s = 0.0;
    for (std::size_t g = 0; g < k; ++g) s += sq[g] - sum[g] * sum[g] / static_cast<double>(cnt[g]);
    best = std::min(best, s);
  }
  return best;
}

Eigen::VectorXd pinv_coefficients(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size()), p = static_cast<Eigen::Index>(x.front().size());
  Eigen::MatrixXd a(n, p + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) a(i, j + 1) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues();
  const double tol = 1e-12 * s(0);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = s(i) > tol ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * s.asDiagonal() * svd.matrixU().transpose() * b;
}

Dataset regression_table(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  std::ostringstream s;
  for (std::size_t j = 0; j < x.front().size(); ++j) s << "x" << j << ",";
  s << "y\n";
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (double v : x[i]) s << format_number(v) << ",";
    s << format_number(y[i]) << "\n";
  }
  return parse_dataset(s.str());
}

std::size_t hits(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] == b[i] ? 1 : 0;
  return n;
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto start = Clock::now();
  Rng rng(2024);
  std::string why;
  for (int t = 0; t < 100; ++t) {
    if (!knn_matches_sort(rng, why)) o.fail("knn instance " + std::to_string(t) + ": " + why);
  }

  std::size_t kmeans_cases = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(4);
    for (double& x : v) x = rng.uniform01() * 10.0;
    for (std::size_t k : {1u, 2u, 3u, 4u}) {
      const auto r = kmeans(Points::from_rows({{v[0]}, {v[1]}, {v[2]}, {v[3]}}), {k, static_cast<std::uint64_t>(t)});
      const double best = optimal_sse_1d(v, k);
      if (std::abs(r.sse - best) > 1e-9 * std::max(1.0, best)) o.fail("kmeans instance " + std::to_string(t));
      ++kmeans_cases;
    }
  }

  double ls_gap = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 5 + rng.uniform_index(30), p = 1 + rng.uniform_index(4);
    std::vector<std::vector<double>> x(n, std::vector<double>(p));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (double& v : x[i]) v = std::round((rng.uniform01() * 4.0 - 2.0) * 1e6) / 1e6;
      y[i] = std::round(rng.uniform01() * 1e7) / 1e6;
    }
    const auto m = fit_least_squares(regression_table(x, y), false);
    const Eigen::VectorXd ref = pinv_coefficients(x, y);
    ls_gap = std::max(ls_gap, std::abs(m.bias - ref(0)));
    for (std::size_t j = 0; j < p; ++j) ls_gap = std::max(ls_gap, std::abs(m.weights[j] - ref(static_cast<Eigen::Index>(j + 1))));
  }
  if (ls_gap > 1e-6) o.fail("least squares gap " + fmt("%.3g", ls_gap));

  for (int t = 0; t < 500; ++t) {
    const std::size_t k = 1 + rng.uniform_index(4), n = 2 + rng.uniform_index(30);
    std::vector<int> clusters(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      clusters[i] = static_cast<int>(rng.uniform_index(k));
      truth[i] = static_cast<int>(rng.uniform_index(k));
    }
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
      std::vector<int> mapped(n);
      for (std::size_t i = 0; i < n; ++i) mapped[i] = perm[static_cast<std::size_t>(clusters[i])];
      best = std::max(best, hits(mapped, truth));
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (hits(match_clusters(Clustering{clusters, k}, truth, k), truth) != best) {
      o.fail("matching instance " + std::to_string(t));
    }
  }

  const double elapsed = seconds_since(start);
  if (elapsed >= 30.0) o.fail("took " + fmt("%.2f", elapsed) + " s");
  if (o.pass) {
    o.detail = "100 knn, " + std::to_string(kmeans_cases) + " kmeans, 200 lstsq (gap " + fmt("%.1e", ls_gap) +
               "), 500 matching; " + fmt("%.2f", elapsed) + " s";
  }
  return o;
}

// ---------------------------------------------------------------------------

Outcome numerical_checks() {
  Outcome o;
  Rng rng(77);
  double worst_rel = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 5 + rng.uniform_index(20), dim = 1 + rng.uniform_index(5);
    Points x(n, dim);
    for (double& v : x.values) v = rng.uniform01() * 2.0 - 1.0;
    std::vector<int> y(n);
    for (int& v : y) v = static_cast<int>(rng.uniform_index(2));
    std::vector<double> w(dim);
    for (double& v : w) v = rng.uniform01() * 4.0 - 2.0;
    const double b = rng.uniform01() * 2.0 - 1.0;
    std::vector<double> gw(dim);
    double gb = 0.0;
    logistic_gradient(x, y, w, b, gw, gb);
    const double h = 1e-5;
    for (std::size_t j = 0; j <= dim; ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      (j < dim ? wp[j] : bp) += h;
      (j < dim ? wm[j] : bm) -= h;
      const double fd = (logistic_log_likelihood(x, y, wp, bp) - logistic_log_likelihood(x, y, wm, bm)) / (2.0 * h);
      const double g = j < dim ? gw[j] : gb;
      const double rel = std::abs(fd - g) / std::max(1.0, std::abs(g));
      worst_rel = std::max(worst_rel, rel);
    }
  }
  if (worst_rel > 1e-6) o.fail("logistic gradient relative error " + fmt("%.3g", worst_rel));

  std::size_t mle_steps = 0;
  for (int t = 0; t < 10 && o.pass; ++t) {
    const std::size_t n = 40, p = 1 + rng.uniform_index(3);
    std::vector<std::vector<double>> x(n, std::vector<double>(p));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (double& v : x[i]) v = rng.uniform01() * 4.0 - 2.0;
      y[i] = rng.uniform01() * 10.0;
    }
    const auto trace = fit_maximum_likelihood(regression_table(x, y)).log_likelihood_trace;
    for (std::size_t i = 1; i < trace.size(); ++i) {
      if (trace[i] < trace[i - 1]) o.fail("MLE log-likelihood fell at step " + std::to_string(i));
    }
    mle_steps += trace.size();
  }

  std::size_t kmeans_iters = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Points p(120, 3);
    for (std::size_t i = 0; i < 120; ++i) {
      for (double& v : p.row(i)) v = static_cast<double>(i % 4) * 1.5 + rng.uniform01();
    }
    const auto r = kmeans(p, {4, seed});
    for (std::size_t i = 1; i < r.sse_trace.size(); ++i) {
      if (r.sse_trace[i] > r.sse_trace[i - 1]) o.fail("k-means SSE rose, seed " + std::to_string(seed));
    }
    kmeans_iters += r.sse_trace.size();
  }

  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 40;
    std::vector<std::vector<double>> x(n, std::vector<double>(2));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (double& v : x[i]) v = rng.uniform01() * 4.0 - 2.0;
      y[i] = std::sin(x[i][0]) + x[i][1] * x[i][1] + rng.uniform01();
    }
    const Dataset d = regression_table(x, y);
    double prev = std::numeric_limits<double>::infinity();
    for (int degree = 1; degree <= 5; ++degree) {
      const auto m = fit_polynomial(d, degree);
      std::vector<double> pred;
      for (std::size_t i = 0; i < n; ++i) pred.push_back(m.predict(d.row(i)));
      const double r = rmsd(pred, y);
      // Nested least-squares fits; the slack covers solver rounding only.
      if (r > prev + 1e-9) o.fail("polynomial RMSD rose at degree " + std::to_string(degree));
      prev = r;
    }
  }
  if (o.pass) {
    o.detail = "gradient rel err " + fmt("%.1e", worst_rel) + ", " + std::to_string(mle_steps) + " MLE steps, " +
               std::to_string(kmeans_iters) + " k-means iterations, degrees 1-5";
  }
  return o;
}

// ---------------------------------------------------------------------------

struct E2E {
  RobustnessReport report;
  double seconds = 0.0;
  fs::path directory;
};

Outcome metric_identities(const E2E& e2e) {
  Outcome o;
  auto check_prf = [&](double p, double r, double f, const std::string& where) {
    for (double v : {p, r, f}) {
      if (!(v >= 0.0 && v <= 1.0)) o.fail(where + ": value outside [0,1]");
    }
    const double expected = p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
    if (std::abs(f - expected) > 1e-12) o.fail(where + ": F is not the harmonic mean");
  };
  std::size_t checked = 0;
  for (const auto& r : e2e.report.results) {
    if (r.precision && r.recall && r.f_measure) {
      check_prf(*r.precision, *r.recall, *r.f_measure, std::string(to_string(r.algorithm)));
      ++checked;
    }
    for (const auto& f : r.fold_prf) {
      check_prf(f.precision, f.recall, f.f_measure, std::string(to_string(r.algorithm)) + " fold");
      ++checked;
    }
  }
  if (checked == 0) o.fail("no P/R/F results emitted");

  const std::vector<double> truth{2.5, -1.0, 4.0, 7.25};
  const auto same = regression_measures(truth, truth);
  if (same.rmsd != 0.0 || same.nrmsd.value_or(1) != 0.0 || same.cv_rmsd.value_or(1) != 0.0) o.fail("RMSD(truth, truth) != 0");

  const std::vector<int> t1{0, 0, 1}, p1{0, 1, 1};
  const auto a = macro_precision_recall_f(p1, t1, 2);
  if (std::abs(a.precision - 0.75) > 1e-12 || std::abs(a.recall - 0.75) > 1e-12 || std::abs(a.f_measure - 0.75) > 1e-12) {
    o.fail("[A,A,B] vs [A,B,B] micro-example");
  }
  const std::vector<int> t2{0, 1, 0, 1}, p2{0, 0, 0, 0};
  const auto b = macro_precision_recall_f(p2, t2, 2);
  if (std::abs(b.precision - 0.25) > 1e-12 || std::abs(b.recall - 0.5) > 1e-12) o.fail("single-class micro-example");
  const auto c = macro_precision_recall_f(t2, t2, 2);
  if (c.precision != 1.0 || c.recall != 1.0 || c.f_measure != 1.0) o.fail("perfect prediction micro-example");
  const std::vector<double> pr{1.0, 3.0}, tr{1.0, 1.0};
  const auto m = regression_measures(pr, tr);
  const double r2 = std::sqrt(2.0);
  if (std::abs(m.rmsd - r2) > 1e-12 || std::abs(m.nrmsd.value_or(0) - r2 / 2.0) > 1e-12 ||
      std::abs(m.cv_rmsd.value_or(0) - r2 / 2.0) > 1e-12) {
    o.fail("[1,3] vs [1,1] micro-example");
  }
  if (o.pass) o.detail = std::to_string(checked) + " emitted P/R/F triples, 4 micro-examples";
  return o;
}

E2E run_e2e() {
  E2E out;
  app::RunConfig config = app::load_run_config(fs::path(DIRTYBENCH_DATA_DIR) / "e2e.json");
  out.directory = fs::temp_directory_path() / "dirtybench_acceptance_e2e";
  fs::remove_all(out.directory);
  config.output_dir = out.directory;
  config.jobs = 1;
  app::validate(config);
  const auto start = Clock::now();
  const auto datasets = app::load_datasets(config);
  out.report = run_sweep(datasets, app::sweep_config(config));
  write_report(out.report, out.directory);
  out.seconds = seconds_since(start);
  return out;
}

Outcome end_to_end(const E2E& e2e) {
  Outcome o;
  const auto& r = e2e.report;
  if (!r.errors.empty()) o.fail(std::to_string(r.errors.size()) + " failed combinations, first: " + r.errors[0].message);
  if (r.rates.size() != 6 || std::abs(r.rates.back() - 0.5) > 1e-12) o.fail("grid is not 0..50% in steps of 10");

  // Priority measure per algorithm (precision, or RMSD for regression),
  // averaged over datasets and the five repetitions.
  std::map<AlgorithmId, std::pair<double, double>> sums;
  std::map<AlgorithmId, std::pair<std::size_t, std::size_t>> counts;
  std::map<AlgorithmId, std::size_t> seeds;
  std::map<AlgorithmId, std::vector<std::uint64_t>> seen;
  for (const auto& res : r.results) {
    const auto v = res.task == Task::regression ? res.rmsd : res.precision;
    if (!v) continue;
    if (std::abs(res.rate) < 1e-12) {
      sums[res.algorithm].first += *v;
      ++counts[res.algorithm].first;
      auto& s = seen[res.algorithm];
      if (std::find(s.begin(), s.end(), res.seed) == s.end()) s.push_back(res.seed);
    } else if (std::abs(res.rate - 0.5) < 1e-12) {
      sums[res.algorithm].second += *v;
      ++counts[res.algorithm].second;
    }
  }
  std::size_t degraded = 0;
  std::string stable;
  for (AlgorithmId a : all_algorithms()) {
    const auto c = counts[a];
    if (c.first == 0 || c.second == 0) {
      o.fail(std::string(to_string(a)) + " produced no results");
      continue;
    }
    if (seen[a].size() != 5) o.fail(std::string(to_string(a)) + " ran " + std::to_string(seen[a].size()) + " seeds");
    const double clean = sums[a].first / static_cast<double>(c.first);
    const double dirty = sums[a].second / static_cast<double>(c.second);
    const bool worse = task_of(a) == Task::regression ? dirty > clean : dirty < clean;
    if (worse) {
      ++degraded;
    } else {
      stable += std::string(stable.empty() ? "" : ",") + std::string(to_string(a));
    }
  }
  if (degraded < 12) o.fail("only " + std::to_string(degraded) + "/16 degraded");

  // Table shape: one row per algorithm, three measures per error type.
  auto table_rows = [](const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t rows = 0, width = 0;
    std::getline(in, line);
    std::getline(in, line);
    width = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    while (std::getline(in, line)) {
      if (static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) != width) return std::size_t{0};
      ++rows;
    }
    return width == 4 ? rows : std::size_t{0};
  };
  if (table_rows(read_text_file(e2e.directory / "sensibility_prf.csv")) != 12) o.fail("P/R/F sensibility table shape");
  if (table_rows(read_text_file(e2e.directory / "keeping_point_prf.csv")) != 12) o.fail("P/R/F keeping-point table shape");
  if (table_rows(read_text_file(e2e.directory / "sensibility_regression.csv")) != 4) o.fail("regression sensibility table shape");
  if (table_rows(read_text_file(e2e.directory / "keeping_point_regression.csv")) != 4) o.fail("regression keeping-point table shape");
  if (e2e.seconds >= 600.0) o.fail("took " + fmt("%.1f", e2e.seconds) + " s");
  if (o.pass) {
    o.detail = std::to_string(degraded) + "/16 degraded" + (stable.empty() ? "" : " (not: " + stable + ")") + ", " +
               std::to_string(r.results.size()) + " cells, " + fmt("%.1f", e2e.seconds) + " s";
  }
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const Outcome& o) {
    std::printf("%s %-22s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      Outcome o;
      o.fail(std::string("exception: ") + e.what());
      return o;
    }
  };

  report("sensibility-golden", guarded(example_one));
  report("keeping-point-golden", guarded(example_two));
  report("injection-accuracy", guarded(injection_accuracy));
  report("oracle-equivalence", guarded(oracle_equivalence));
  report("numerical-checks", guarded(numerical_checks));

  E2E e2e;
  std::string e2e_error;
  try {
    e2e = run_e2e();
  } catch (const std::exception& e) {
    e2e_error = e.what();
  }
  auto needs_e2e = [&](const std::function<Outcome()>& f) {
    if (!e2e_error.empty()) {
      Outcome o;
      o.fail("sweep failed: " + e2e_error);
      return o;
    }
    return guarded(f);
  };
  report("metric-identities", needs_e2e([&] { return metric_identities(e2e); }));
  report("end-to-end-sweep", needs_e2e([&] { return end_to_end(e2e); }));
  fs::remove_all(e2e.directory);
  return failures == 0 ? 0 : 1;
}
