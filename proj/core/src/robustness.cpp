#include "dirtybench/robustness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "dirtybench/error.hpp"
#include "dirtybench/random.hpp"

namespace dirtybench {

namespace {

constexpr double kRateTolerance = 1e-9;

double round_rate(double r) { return std::round(r * 1e12) / 1e12; }

bool same_rate(double a, double b) { return std::abs(a - b) <= kRateTolerance; }

std::string percent(double fraction) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << fraction * 100.0 << '%';
  return out.str();
}

}  // namespace

std::string_view to_string(Measure measure) noexcept {
  switch (measure) {
    case Measure::precision: return "precision";
    case Measure::recall: return "recall";
    case Measure::f_measure: return "f_measure";
    case Measure::rmsd: return "rmsd";
    case Measure::nrmsd: return "nrmsd";
    case Measure::cv_rmsd: return "cv_rmsd";
  }
  return "precision";
}

Measure measure_from_string(std::string_view name) {
  for (Measure m : {Measure::precision, Measure::recall, Measure::f_measure, Measure::rmsd, Measure::nrmsd,
                    Measure::cv_rmsd}) {
    if (to_string(m) == name) return m;
  }
  if (name == "P") return Measure::precision;
  if (name == "R") return Measure::recall;
  if (name == "F") return Measure::f_measure;
  throw Error(ErrorCode::configuration, "unknown measure '" + std::string(name) + "'");
}

bool higher_is_better(Measure measure) noexcept {
  return measure == Measure::precision || measure == Measure::recall || measure == Measure::f_measure;
}

const std::vector<Measure>& measures_for(Task task) {
  static const std::vector<Measure> prf{Measure::precision, Measure::recall, Measure::f_measure};
  static const std::vector<Measure> reg{Measure::rmsd, Measure::nrmsd, Measure::cv_rmsd};
  return task == Task::regression ? reg : prf;
}

std::optional<double> measure_value(const EvalResult& result, Measure measure) {
  switch (measure) {
    case Measure::precision: return result.precision;
    case Measure::recall: return result.recall;
    case Measure::f_measure: return result.f_measure;
    case Measure::rmsd: return result.rmsd;
    case Measure::nrmsd: return result.nrmsd;
    case Measure::cv_rmsd: return result.cv_rmsd;
  }
  return std::nullopt;
}

void MetricSeries::validate() const {
  if (rates.size() != values.size()) throw Error(ErrorCode::parameter, "series rates and values differ in length");
  if (rates.size() < 2) throw Error(ErrorCode::parameter, "a series needs at least two points");
  const double step = rates[1] - rates[0];
  if (!(step > 0.0)) throw Error(ErrorCode::parameter, "series rates must be strictly ascending");
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (std::abs((rates[i] - rates[i - 1]) - step) > kRateTolerance) {
      throw Error(ErrorCode::parameter, "series rates are not uniformly spaced");
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::parameter, "series values must be finite");
  }
}

double sensibility(const MetricSeries& series) {
  series.validate();
  double total = 0.0;
  for (std::size_t i = 1; i < series.values.size(); ++i) total += std::abs(series.values[i - 1] - series.values[i]);
  return total;
}

double keeping_point(const MetricSeries& series, double k) {
  series.validate();
  if (!(k > 0.0)) throw Error(ErrorCode::parameter, "threshold k must be positive");
  const double base = series.values.front();
  // Absorbs rounding in differences that equal k exactly.
  const double slack = 1e-12 * std::max(1.0, std::isfinite(k) ? std::abs(k) : 1.0);
  for (std::size_t i = 1; i < series.values.size(); ++i) {
    const double drop = series.direction == Direction::higher_better ? base - series.values[i]
                                                                       : series.values[i] - base;
    if (drop > k + slack) return series.rates[i - 1];
  }
  return series.rates.back();
}

std::vector<double> RateGrid::rates() const {
  if (!(step > 0.0) && steps > 0) throw Error(ErrorCode::configuration, "grid step must be positive");
  if (start < 0.0) throw Error(ErrorCode::configuration, "grid start must be non-negative");
  std::vector<double> out;
  for (std::size_t i = 0; i <= steps; ++i) out.push_back(round_rate(start + static_cast<double>(i) * step));
  if (out.back() > 1.0 + kRateTolerance) throw Error(ErrorCode::configuration, "grid exceeds a rate of 1");
  return out;
}

std::uint64_t repetition_seed(std::uint64_t root, std::size_t repetition) { return derive_seed(root, repetition); }

std::uint64_t corruption_seed(std::uint64_t run_seed, std::string_view dataset_hash, ErrorType type, double rate) {
  const auto ppm = static_cast<std::uint64_t>(std::llround(rate * 1e6));
  return derive_seed(run_seed, fnv1a64(dataset_hash), static_cast<std::uint64_t>(type), ppm);
}

namespace {

std::vector<Task> tasks_of(const DatasetEntry& entry) {
  if (!entry.tasks.empty()) return entry.tasks;
  const auto t = entry.data.schema().target_index();
  if (t && entry.data.schema().column(*t).kind == ColumnKind::numeric) return {Task::regression};
  return {Task::classification, Task::clustering};
}

struct SweepCell {
  std::size_t dataset;
  AlgorithmId algorithm;
  ErrorType error_type;
  std::size_t rate_index;
  std::size_t repetition;
};

}  // namespace

RobustnessReport run_sweep(const std::vector<DatasetEntry>& datasets, const SweepConfig& config,
                           const ProgressFn& progress) {
  if (datasets.empty()) throw Error(ErrorCode::configuration, "no datasets to sweep");
  if (config.error_types.empty()) throw Error(ErrorCode::configuration, "no error types to sweep");
  if (config.repetitions == 0) throw Error(ErrorCode::configuration, "repetitions must be positive");
  RobustnessReport report;
  report.config_hash = config.config_hash;
  report.root_seed = config.seed;
  report.rates = config.grid.rates();
  if (!same_rate(report.rates.front(), 0.0)) {
    throw Error(ErrorCode::configuration, "the rate grid must start at 0 so the clean baseline is measured");
  }
  report.k_prf = config.k_prf;
  report.k_regression = config.k_regression;

  std::vector<std::string> hashes;
  std::vector<SweepCell> cells;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const auto& entry = datasets[d];
    hashes.push_back(entry.data.provenance().content_hash.empty() ? content_hash(entry.data)
                                                                 : entry.data.provenance().content_hash);
    const auto tasks = tasks_of(entry);
    const auto& algos = entry.algorithms.empty() ? config.algorithms : entry.algorithms;
    for (AlgorithmId a : algos) {
      if (a != AlgorithmId::scripted && std::find(tasks.begin(), tasks.end(), task_of(a)) == tasks.end()) continue;
      for (ErrorType e : config.error_types) {
        for (std::size_t r = 0; r < report.rates.size(); ++r) {
          for (std::size_t rep = 0; rep < config.repetitions; ++rep) cells.push_back({d, a, e, r, rep});
        }
      }
    }
  }
  if (cells.empty()) throw Error(ErrorCode::configuration, "no algorithm applies to any dataset");

  std::vector<std::optional<EvalResult>> outcomes(cells.size());
  std::vector<std::string> failures(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const SweepCell& c = cells[i];
      const auto& entry = datasets[c.dataset];
      const std::uint64_t run_seed = repetition_seed(config.seed, c.repetition);
      CorruptionSpec spec;
      spec.error_type = c.error_type;
      spec.rate = report.rates[c.rate_index];
      spec.seed = corruption_seed(run_seed, hashes[c.dataset], c.error_type, spec.rate);
      spec.corrupt_target_in_train = config.corrupt_target_in_train;
      spec.rules = entry.rules;
      spec.entity_key = entry.entity_key;
      try {
        outcomes[i] = cross_validate(entry.data, c.algorithm, config.hyper, spec, config.eval, run_seed, entry.id);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(entry.id + " " + std::string(to_string(c.algorithm)) + " " + std::string(to_string(c.error_type)) +
                 " rate=" + format_number(spec.rate) + " rep=" + std::to_string(c.repetition) +
                 (failures[i].empty() ? "" : " FAILED"));
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, cells.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const SweepCell& c = cells[i];
    if (outcomes[i]) report.results.push_back(std::move(*outcomes[i]));
    if (failures[i].empty()) continue;
    const auto& id = datasets[c.dataset].id;
    const bool known = std::any_of(report.errors.begin(), report.errors.end(), [&](const CombinationError& e) {
      return e.dataset == id && e.algorithm == c.algorithm && e.error_type == c.error_type;
    });
    if (!known) report.errors.push_back({id, c.algorithm, c.error_type, report.rates[c.rate_index], failures[i]});
  }
  summarize(report);
  return report;
}

void summarize(RobustnessReport& report) {
  report.series.clear();
  report.summaries.clear();
  report.rankings.clear();

  struct Key {
    std::string dataset;
    AlgorithmId algorithm;
    ErrorType error_type;
    bool operator<(const Key& o) const {
      return std::tie(dataset, algorithm, error_type) < std::tie(o.dataset, o.algorithm, o.error_type);
    }
  };
  std::vector<Key> order;
  std::map<Key, std::vector<const EvalResult*>> groups;
  for (const auto& r : report.results) {
    Key k{r.dataset, r.algorithm, r.error_type};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }

  for (const Key& key : order) {
    const bool failed = std::any_of(report.errors.begin(), report.errors.end(), [&](const CombinationError& e) {
      return e.dataset == key.dataset && e.algorithm == key.algorithm && e.error_type == key.error_type;
    });
    if (failed) continue;
    const auto& rows = groups[key];
    const Task task = rows.front()->task;
    for (Measure m : measures_for(task)) {
      SeriesSummary s;
      s.dataset = key.dataset;
      s.algorithm = key.algorithm;
      s.task = task;
      s.error_type = key.error_type;
      s.measure = m;
      s.series.direction = higher_is_better(m) ? Direction::higher_better : Direction::lower_better;
      std::vector<std::string> undefined_at;
      for (double rate : report.rates) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const EvalResult* r : rows) {
          if (!same_rate(r->rate, rate)) continue;
          if (auto v = measure_value(*r, m)) {
            sum += *v;
            ++count;
          }
        }
        if (count == 0) {
          undefined_at.push_back(format_number(rate));
          continue;
        }
        s.series.rates.push_back(rate);
        s.series.values.push_back(sum / static_cast<double>(count));
      }
      const double k = higher_is_better(m) ? report.k_prf : report.k_regression;
      if (!undefined_at.empty()) {
        std::string list;
        for (const auto& u : undefined_at) list += (list.empty() ? "" : " ") + u;
        s.notes.push_back("undefined at rates " + list + "; sensibility and keeping point not computed");
      } else if (s.series.rates.size() < 2) {
        s.notes.push_back("grid has a single rate; sensibility undefined");
      } else {
        s.sensibility = sensibility(s.series);
        s.keeping_point = keeping_point(s.series, k);
      }
      report.series.push_back(std::move(s));
    }
  }

  // Per-algorithm means across datasets.
  std::vector<AlgorithmId> algos;
  for (const auto& s : report.series) {
    if (std::find(algos.begin(), algos.end(), s.algorithm) == algos.end()) algos.push_back(s.algorithm);
  }
  std::sort(algos.begin(), algos.end());
  for (AlgorithmId a : algos) {
    for (ErrorType e : {ErrorType::missing, ErrorType::inconsistent, ErrorType::conflicting}) {
      for (Measure m : {Measure::precision, Measure::recall, Measure::f_measure, Measure::rmsd, Measure::nrmsd,
                        Measure::cv_rmsd}) {
        AlgorithmSummary sum;
        sum.algorithm = a;
        sum.error_type = e;
        sum.measure = m;
        double sens = 0.0, kp = 0.0, clean = 0.0;
        std::size_t n_sens = 0, n_kp = 0, n_clean = 0;
        for (const auto& s : report.series) {
          if (s.algorithm != a || s.error_type != e || s.measure != m) continue;
          sum.task = s.task;
          ++sum.datasets;
          if (s.sensibility) sens += *s.sensibility, ++n_sens;
          if (s.keeping_point) kp += *s.keeping_point, ++n_kp;
          if (!s.series.values.empty() && same_rate(s.series.rates.front(), 0.0)) {
            clean += s.series.values.front();
            ++n_clean;
          }
        }
        if (sum.datasets == 0) continue;
        if (n_sens) sum.mean_sensibility = sens / static_cast<double>(n_sens);
        if (n_kp) sum.mean_keeping_point = kp / static_cast<double>(n_kp);
        if (n_clean) sum.mean_clean_value = clean / static_cast<double>(n_clean);
        report.summaries.push_back(sum);
      }
    }
  }

  for (Task t : {Task::classification, Task::clustering, Task::regression}) {
    for (ErrorType e : {ErrorType::missing, ErrorType::inconsistent, ErrorType::conflicting}) {
      for (Measure m : measures_for(t)) {
        std::vector<std::pair<double, AlgorithmId>> ranked;
        for (const auto& s : report.summaries) {
          if (s.task == t && s.error_type == e && s.measure == m && s.mean_sensibility) {
            ranked.emplace_back(*s.mean_sensibility, s.algorithm);
          }
        }
        if (ranked.empty()) continue;
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
        Ranking r{t, e, m, {}};
        for (const auto& [v, a] : ranked) r.order.push_back(a);
        report.rankings.push_back(std::move(r));
      }
    }
  }
}

// ---------------------------------------------------------------------------

ErrorType dominant_error(const ErrorRates& rates) {
  ErrorType best = ErrorType::missing;
  double top = rates.missing;
  if (rates.inconsistent > top) {
    best = ErrorType::inconsistent;
    top = rates.inconsistent;
  }
  if (rates.conflicting > top) best = ErrorType::conflicting;
  return best;
}

namespace {

double detected_rate(const ErrorRates& r, ErrorType t) {
  switch (t) {
    case ErrorType::missing: return r.missing;
    case ErrorType::inconsistent: return r.inconsistent;
    case ErrorType::conflicting: return r.conflicting;
  }
  return 0.0;
}

struct Evidence {
  std::optional<double> clean;
  std::map<ErrorType, double> sensibility;
  std::map<ErrorType, double> keeping_point;
};

}  // namespace

Recommendation recommend(const RobustnessReport& report, const RecommendOptions& options) {
  Recommendation rec;
  rec.task = options.task;
  rec.detected = options.detected;
  rec.data_size = options.data_size;
  rec.priority = options.priority.value_or(options.task == Task::regression ? Measure::rmsd : Measure::precision);
  const auto& allowed = measures_for(options.task);
  if (std::find(allowed.begin(), allowed.end(), rec.priority) == allowed.end()) {
    throw Error(ErrorCode::configuration, "measure " + std::string(to_string(rec.priority)) + " does not apply to " +
                                              std::string(to_string(options.task)));
  }

  // Mean over datasets of the series for each algorithm.
  std::map<AlgorithmId, Evidence> evidence;
  {
    struct Acc {
      double sum = 0.0;
      std::size_t n = 0;
    };
    std::map<AlgorithmId, Acc> clean;
    std::map<std::pair<AlgorithmId, ErrorType>, Acc> sens, kp;
    for (const auto& s : report.series) {
      if (s.task != options.task || s.measure != rec.priority) continue;
      if (options.dataset && s.dataset != *options.dataset) continue;
      if (!s.series.values.empty() && same_rate(s.series.rates.front(), 0.0) && s.error_type == ErrorType::missing) {
        clean[s.algorithm].sum += s.series.values.front();
        ++clean[s.algorithm].n;
      }
      evidence[s.algorithm];
      if (s.sensibility) {
        auto& a = sens[{s.algorithm, s.error_type}];
        a.sum += *s.sensibility;
        ++a.n;
      }
      if (s.keeping_point) {
        auto& a = kp[{s.algorithm, s.error_type}];
        a.sum += *s.keeping_point;
        ++a.n;
      }
    }
    // Fall back to any error type's rate-0 point when no missing-error series exists.
    for (const auto& s : report.series) {
      if (s.task != options.task || s.measure != rec.priority) continue;
      if (options.dataset && s.dataset != *options.dataset) continue;
      if (clean.count(s.algorithm) || s.series.values.empty() || !same_rate(s.series.rates.front(), 0.0)) continue;
      evidence[s.algorithm].clean = s.series.values.front();
    }
    for (auto& [a, acc] : clean) evidence[a].clean = acc.sum / static_cast<double>(acc.n);
    for (auto& [key, acc] : sens) evidence[key.first].sensibility[key.second] = acc.sum / static_cast<double>(acc.n);
    for (auto& [key, acc] : kp) evidence[key.first].keeping_point[key.second] = acc.sum / static_cast<double>(acc.n);
  }

  // Step 2: acceptable clean-data quality.
  const bool prf = higher_is_better(rec.priority);
  const double threshold = prf ? options.prf_threshold
                               : (rec.priority == Measure::nrmsd ? options.nrmsd_threshold : options.rmsd_threshold);
  std::vector<std::pair<double, std::pair<AlgorithmId, double>>> misses;
  for (const auto& [a, ev] : evidence) {
    if (!ev.clean) continue;
    const double v = *ev.clean;
    const bool ok = prf ? v > threshold : v < threshold;
    if (ok) rec.candidates.emplace_back(a, v);
    else misses.push_back({std::abs(v - threshold), {a, v}});
  }
  std::stable_sort(misses.begin(), misses.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t i = 0; i < misses.size() && i < 3; ++i) rec.nearest_misses.push_back(misses[i].second);

  rec.dominant = dominant_error(options.detected);
  if (rec.candidates.empty()) {
    rec.reason = "no acceptable algorithm";
    return rec;
  }
  auto is_candidate = [&](AlgorithmId a) {
    return std::any_of(rec.candidates.begin(), rec.candidates.end(), [&](const auto& c) { return c.first == a; });
  };

  // Step 3: data-size rule.
  if (options.task == Task::classification && options.data_size > 0 && options.data_size < options.small_rows &&
      is_candidate(AlgorithmId::logistic_regression)) {
    rec.chosen = AlgorithmId::logistic_regression;
    rec.reason = "small data (" + std::to_string(options.data_size) + " rows): logistic regression is a candidate";
  } else if (options.task == Task::clustering && options.data_size >= options.large_rows &&
             is_candidate(AlgorithmId::dbscan)) {
    rec.chosen = AlgorithmId::dbscan;
    rec.reason = "large data (" + std::to_string(options.data_size) + " rows): DBSCAN is a candidate";
  } else {
    // Step 4: least sensitive candidate under the dominant error type.
    std::optional<double> best;
    for (const auto& [a, v] : rec.candidates) {
      const auto& sens = evidence[a].sensibility;
      auto it = sens.find(rec.dominant);
      if (it == sens.end()) continue;
      if (!best || it->second < *best) {
        best = it->second;
        rec.chosen = a;
      }
    }
    if (rec.chosen) {
      rec.reason = "least sensitive candidate under " + std::string(to_string(rec.dominant)) + " errors (sensibility " +
                   format_number(*best) + ")";
    } else {
      rec.reason = "no candidate has a sensibility for " + std::string(to_string(rec.dominant)) + " errors";
      return rec;
    }
  }

  // Step 5: cleaning targets.
  for (ErrorType e : {ErrorType::missing, ErrorType::inconsistent, ErrorType::conflicting}) {
    CleaningTarget t;
    t.error_type = e;
    t.detected = detected_rate(options.detected, e);
    const auto& kps = evidence[*rec.chosen].keeping_point;
    if (auto it = kps.find(e); it != kps.end()) {
      t.keeping_point = it->second;
      if (t.detected > it->second + kRateTolerance) t.clean_to = it->second;
    }
    rec.targets.push_back(t);
  }
  return rec;
}

std::string to_text(const Recommendation& rec) {
  std::ostringstream out;
  out << "task: " << to_string(rec.task) << "\n";
  out << "priority measure: " << to_string(rec.priority) << "\n";
  out << "1. detected error rates: missing " << percent(rec.detected.missing) << ", inconsistent "
      << percent(rec.detected.inconsistent) << ", conflicting " << percent(rec.detected.conflicting) << "\n";
  out << "2. candidates:";
  if (rec.candidates.empty()) out << " none";
  for (const auto& [a, v] : rec.candidates) out << " " << to_string(a) << " (" << format_number(v) << ")";
  out << "\n";
  if (rec.candidates.empty()) {
    out << "   no acceptable algorithm; nearest misses:";
    for (const auto& [a, v] : rec.nearest_misses) out << " " << to_string(a) << " (" << format_number(v) << ")";
    out << "\n";
    return out.str();
  }
  out << "3. dominant error type: " << to_string(rec.dominant) << "\n";
  out << "4. chosen algorithm: " << (rec.chosen ? std::string(to_string(*rec.chosen)) : std::string("none")) << " - "
      << rec.reason << "\n";
  if (!rec.chosen) return out.str();
  out << "5. cleaning targets:\n";
  for (const auto& t : rec.targets) {
    out << "   " << to_string(t.error_type) << ": detected " << percent(t.detected);
    if (!t.keeping_point) {
      out << ", no keeping point measured\n";
    } else if (t.clean_to) {
      out << ", clean to " << percent(*t.clean_to) << "\n";
    } else {
      out << ", within keeping point " << percent(*t.keeping_point) << "\n";
    }
  }
  return out.str();
}

}  // namespace dirtybench
