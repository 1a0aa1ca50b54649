#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "dirtybench/error.hpp"

namespace dirtybench::app {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config = 2,
  exit_partial = 3,
  exit_io = 4,
};

/// Maps a library error to the process exit code.
int exit_code_for(const Error& error);

/// Command-line settings that override the config file when present.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::size_t> repetitions;
  std::optional<std::size_t> folds;
  bool no_timing = false;
  std::vector<std::string> algorithms;
  std::vector<std::string> error_types;
};

void apply(const Overrides& overrides, RunConfig& config);

struct InjectArgs {
  std::filesystem::path config;
  Overrides overrides;
  std::optional<std::string> dataset;
  std::optional<std::string> error_type;
  std::optional<double> rate;
};

struct SweepArgs {
  std::filesystem::path config;
  Overrides overrides;
  bool dry_run = false;
  bool quiet = false;
};

struct RecommendArgs {
  std::filesystem::path report;
  std::string task = "classification";
  std::optional<double> missing;
  std::optional<double> inconsistent;
  std::optional<double> conflicting;
  /// Dirty dataset to measure error rates and size from.
  std::optional<std::filesystem::path> data;
  std::optional<std::string> target;
  std::optional<std::filesystem::path> rules;
  std::vector<std::string> entity_key;
  std::optional<std::size_t> size;
  std::optional<std::string> measure;
  std::optional<std::string> dataset_id;
  std::optional<std::filesystem::path> json_out;
  std::size_t small_rows = 1000;
  std::size_t large_rows = 10000;
};

int cmd_validate_config(const std::filesystem::path& config, const Overrides& overrides, std::ostream& out);
int cmd_inject(const InjectArgs& args, std::ostream& out);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& log);
int cmd_recommend(const RecommendArgs& args, std::ostream& out);

}  // namespace dirtybench::app
