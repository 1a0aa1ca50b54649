#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace dirtybench;
using namespace dirtybench::app;

namespace {

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Root seed");
  cmd->add_option("--jobs", o.jobs, "Worker threads (0 = hardware threads)");
  cmd->add_option("--output-dir", o.output_dir, "Output directory");
  cmd->add_option("--repetitions", o.repetitions, "Repetitions per rate");
  cmd->add_option("--folds", o.folds, "Cross-validation folds");
  cmd->add_flag("--no-timing", o.no_timing, "Skip the timing column");
  cmd->add_option("--algorithms", o.algorithms, "Algorithm names, or 'all'")->delimiter(',');
  cmd->add_option("--error-types", o.error_types, "missing, inconsistent, conflicting")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robustness benchmarks for algorithms on dirty data"};
  app.require_subcommand(1);

  Overrides validate_overrides;
  std::filesystem::path validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "Check a run configuration and its datasets");
  validate_cmd->add_option("config", validate_path, "Config file")->required();
  add_overrides(validate_cmd, validate_overrides);

  InjectArgs inject_args;
  auto* inject_cmd = app.add_subcommand("inject", "Write a corrupted copy of one dataset");
  inject_cmd->add_option("config", inject_args.config, "Config file")->required();
  inject_cmd->add_option("--dataset", inject_args.dataset, "Dataset id");
  inject_cmd->add_option("--error-type", inject_args.error_type, "missing, inconsistent or conflicting");
  inject_cmd->add_option("--rate", inject_args.rate, "Error rate in [0, 1]");
  add_overrides(inject_cmd, inject_args.overrides);

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the robustness sweep and write the report");
  sweep_cmd->add_option("config", sweep_args.config, "Config file")->required();
  sweep_cmd->add_flag("--dry-run", sweep_args.dry_run, "Print the plan without running it");
  sweep_cmd->add_flag("--quiet", sweep_args.quiet, "No progress lines");
  add_overrides(sweep_cmd, sweep_args.overrides);

  RecommendArgs rec;
  auto* rec_cmd = app.add_subcommand("recommend", "Choose an algorithm and cleaning targets from a report");
  rec_cmd->add_option("--report", rec.report, "report.json from a sweep")->required();
  rec_cmd->add_option("--task", rec.task, "classification, clustering or regression");
  rec_cmd->add_option("--missing", rec.missing, "Detected missing rate");
  rec_cmd->add_option("--inconsistent", rec.inconsistent, "Detected inconsistent rate");
  rec_cmd->add_option("--conflicting", rec.conflicting, "Detected conflicting rate");
  rec_cmd->add_option("--data", rec.data, "Dirty dataset to measure");
  rec_cmd->add_option("--target", rec.target, "Target column of --data");
  rec_cmd->add_option("--rules", rec.rules, "Consistency rules for --data");
  rec_cmd->add_option("--entity-key", rec.entity_key, "Entity key columns for --data")->delimiter(',');
  rec_cmd->add_option("--size", rec.size, "Number of rows");
  rec_cmd->add_option("--measure", rec.measure, "Priority measure");
  rec_cmd->add_option("--dataset-id", rec.dataset_id, "Use evidence from one dataset only");
  rec_cmd->add_option("--json", rec.json_out, "Also write the recommendation as JSON");
  rec_cmd->add_option("--small-rows", rec.small_rows, "Small-data threshold");
  rec_cmd->add_option("--large-rows", rec.large_rows, "Large-data threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (*validate_cmd) return cmd_validate_config(validate_path, validate_overrides, std::cout);
    if (*inject_cmd) return cmd_inject(inject_args, std::cout);
    if (*sweep_cmd) return cmd_sweep(sweep_args, std::cout, std::cerr);
    if (*rec_cmd) return cmd_recommend(rec, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_failure;
}
