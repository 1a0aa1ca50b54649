#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dirtybench/robustness.hpp"

namespace dirtybench::app {

struct DatasetConfig {
  std::string id;
  std::filesystem::path path;
  std::vector<Task> tasks;
  std::optional<std::string> target;
  bool no_target = false;
  bool categorical_target = false;
  char delimiter = ',';
  bool header = true;
  std::optional<std::filesystem::path> rules;
  std::vector<std::string> entity_key;
  /// Binarizes the target into this class against all others.
  std::optional<std::string> positive_class;
  std::vector<AlgorithmId> algorithms;
  std::vector<std::string> missing_tokens{""};
};

struct InjectConfig {
  std::string dataset;
  ErrorType error_type = ErrorType::missing;
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::filesystem::path output_dir = "injected";
};

struct RunConfig {
  std::vector<DatasetConfig> datasets;
  std::vector<AlgorithmId> algorithms;
  std::vector<ErrorType> error_types{ErrorType::missing};
  RateGrid grid;
  std::uint64_t seed = 0;
  std::size_t repetitions = 5;
  double k_prf = 0.10;
  double k_regression = 0.1;
  std::size_t folds = 10;
  bool timing = true;
  std::size_t timing_repeats = 5;
  std::filesystem::path output_dir = "dirtybench-out";
  std::size_t small_rows = 1000;
  std::size_t large_rows = 10000;
  bool corrupt_target_in_train = false;
  /// 0 selects the number of hardware threads.
  std::size_t jobs = 0;
  Hyperparameters hyper;
  std::optional<InjectConfig> inject;
};

/// Parses a JSON run configuration. Unknown keys and invalid values throw a
/// configuration error. Relative paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Throws a configuration error for inconsistent settings (empty lists,
/// unusable grid, bad thresholds).
void validate(const RunConfig& config);

/// Every setting made explicit, as JSON. Parsing this text gives back an
/// equivalent configuration.
std::string resolved_json(const RunConfig& config);

/// Hash of the settings that determine results (job count and output
/// directory excluded).
std::string config_hash(const RunConfig& config);

/// Loads every dataset (and its rule file) listed in the config.
std::vector<DatasetEntry> load_datasets(const RunConfig& config);
DatasetEntry load_dataset_entry(const DatasetConfig& config);

SweepConfig sweep_config(const RunConfig& config);

}  // namespace dirtybench::app
