#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dirtybench/evaluate.hpp"

namespace dirtybench {

enum class Measure { precision, recall, f_measure, rmsd, nrmsd, cv_rmsd };

std::string_view to_string(Measure measure) noexcept;
Measure measure_from_string(std::string_view name);
bool higher_is_better(Measure measure) noexcept;
/// precision/recall/f_measure for classification and clustering, the
/// three deviation measures for regression.
const std::vector<Measure>& measures_for(Task task);
std::optional<double> measure_value(const EvalResult& result, Measure measure);

enum class Direction { higher_better, lower_better };

/// A measure sampled on a uniform error-rate grid a, a+x, ..., a+bx.
struct MetricSeries {
  std::vector<double> rates;
  std::vector<double> values;
  Direction direction = Direction::higher_better;

  /// Throws a parameter error unless rates are strictly ascending with
  /// uniform spacing and match the values in length.
  void validate() const;
};

/// Total variation sum_i |y_{a+(i-1)x} - y_{a+ix}|; needs at least two points.
double sensibility(const MetricSeries& series);

/// The rate just before the first grid point whose degradation from the
/// baseline y_a exceeds k; the last rate when no point does.
double keeping_point(const MetricSeries& series, double k);

struct RateGrid {
  double start = 0.0;
  double step = 0.02;
  /// b: number of steps after the start; the grid has b + 1 rates.
  std::size_t steps = 25;

  std::vector<double> rates() const;
};

struct DatasetEntry {
  std::string id;
  Dataset data;
  std::vector<Task> tasks;
  std::vector<FDRule> rules;
  std::vector<std::string> entity_key;
  /// Overrides the sweep-wide algorithm list when not empty.
  std::vector<AlgorithmId> algorithms;
};

struct SweepConfig {
  std::vector<AlgorithmId> algorithms;
  std::vector<ErrorType> error_types{ErrorType::missing};
  RateGrid grid;
  std::uint64_t seed = 0;
  /// Repetitions with independent derived seeds; series take their mean.
  std::size_t repetitions = 5;
  double k_prf = 0.10;
  double k_regression = 0.1;
  EvalOptions eval;
  Hyperparameters hyper;
  bool corrupt_target_in_train = false;
  std::size_t jobs = 1;
  std::string config_hash;
};

struct SeriesSummary {
  std::string dataset;
  AlgorithmId algorithm = AlgorithmId::decision_tree;
  Task task = Task::classification;
  ErrorType error_type = ErrorType::missing;
  Measure measure = Measure::precision;
  MetricSeries series;
  std::optional<double> sensibility;
  std::optional<double> keeping_point;
  std::vector<std::string> notes;
};

/// Per-algorithm means across datasets.
struct AlgorithmSummary {
  AlgorithmId algorithm = AlgorithmId::decision_tree;
  Task task = Task::classification;
  ErrorType error_type = ErrorType::missing;
  Measure measure = Measure::precision;
  std::optional<double> mean_sensibility;
  std::optional<double> mean_keeping_point;
  std::optional<double> mean_clean_value;
  std::size_t datasets = 0;
};

/// Algorithms ordered from most to least sensitive.
struct Ranking {
  Task task = Task::classification;
  ErrorType error_type = ErrorType::missing;
  Measure measure = Measure::precision;
  std::vector<AlgorithmId> order;
};

struct CombinationError {
  std::string dataset;
  AlgorithmId algorithm = AlgorithmId::decision_tree;
  ErrorType error_type = ErrorType::missing;
  std::optional<double> rate;
  std::string message;
};

struct RobustnessReport {
  std::string config_hash;
  std::uint64_t root_seed = 0;
  std::vector<double> rates;
  double k_prf = 0.10;
  double k_regression = 0.1;
  std::vector<EvalResult> results;
  std::vector<SeriesSummary> series;
  std::vector<AlgorithmSummary> summaries;
  std::vector<Ranking> rankings;
  std::vector<CombinationError> errors;
};

/// Seed of repetition `repetition` of a sweep rooted at `root`.
std::uint64_t repetition_seed(std::uint64_t root, std::size_t repetition);
/// Corruption seed for one (run seed, dataset, error type, rate) cell.
std::uint64_t corruption_seed(std::uint64_t run_seed, std::string_view dataset_hash, ErrorType type, double rate);

using ProgressFn = std::function<void(const std::string&)>;

/// Evaluates every (dataset, algorithm, error type, rate, repetition) cell,
/// in parallel when jobs > 1. Results are ordered by cell, never by
/// completion, so the report does not depend on the job count.
RobustnessReport run_sweep(const std::vector<DatasetEntry>& datasets, const SweepConfig& config,
                           const ProgressFn& progress = {});

/// Rebuilds series, summaries and rankings from report.results, skipping
/// combinations listed in report.errors.
void summarize(RobustnessReport& report);

// ---------------------------------------------------------------------------
// Algorithm selection and cleaning targets

struct RecommendOptions {
  Task task = Task::classification;
  ErrorRates detected;
  std::size_t data_size = 0;
  /// Defaults to precision, or RMSD for regression.
  std::optional<Measure> priority;
  /// Restricts the evidence to one dataset; otherwise means across datasets.
  std::optional<std::string> dataset;
  std::size_t small_rows = 1000;
  std::size_t large_rows = 10000;
  double prf_threshold = 0.70;
  double rmsd_threshold = 1.0;
  double nrmsd_threshold = 0.5;
};

struct CleaningTarget {
  ErrorType error_type = ErrorType::missing;
  double detected = 0.0;
  std::optional<double> keeping_point;
  /// Set when the detected rate exceeds the keeping point.
  std::optional<double> clean_to;
};

struct Recommendation {
  Task task = Task::classification;
  Measure priority = Measure::precision;
  ErrorRates detected;
  std::size_t data_size = 0;
  /// (algorithm, clean-data value of the priority measure).
  std::vector<std::pair<AlgorithmId, double>> candidates;
  std::vector<std::pair<AlgorithmId, double>> nearest_misses;
  ErrorType dominant = ErrorType::missing;
  std::optional<AlgorithmId> chosen;
  std::string reason;
  std::vector<CleaningTarget> targets;
};

/// Dominant error type: largest rate, ties broken missing > inconsistent > conflicting.
ErrorType dominant_error(const ErrorRates& rates);

Recommendation recommend(const RobustnessReport& report, const RecommendOptions& options);

std::string to_text(const Recommendation& recommendation);

}  // namespace dirtybench
