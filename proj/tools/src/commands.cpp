#include "commands.hpp"

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <map>

#include "dirtybench/report_io.hpp"
#include "json.hpp"

namespace dirtybench::app {

using nlohmann::json;

int exit_code_for(const Error& error) {
  switch (error.code()) {
    case ErrorCode::configuration:
    case ErrorCode::parse:
    case ErrorCode::binding:
    case ErrorCode::schema:
    case ErrorCode::type:
    case ErrorCode::empty_input:
    case ErrorCode::cycle:
      return exit_config;
    case ErrorCode::io:
      return exit_io;
    default:
      return exit_failure;
  }
}

void apply(const Overrides& o, RunConfig& c) {
  if (o.seed) c.seed = *o.seed;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.repetitions) c.repetitions = *o.repetitions;
  if (o.folds) c.folds = *o.folds;
  if (o.no_timing) c.timing = false;
  if (!o.algorithms.empty()) {
    c.algorithms.clear();
    for (const auto& a : o.algorithms) {
      if (a == "all") {
        c.algorithms = all_algorithms();
        break;
      }
      c.algorithms.push_back(algorithm_from_string(a));
    }
    for (auto& d : c.datasets) d.algorithms.clear();
  }
  if (!o.error_types.empty()) {
    c.error_types.clear();
    for (const auto& e : o.error_types) c.error_types.push_back(error_type_from_string(e));
  }
}

namespace {

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  RunConfig c = load_run_config(path);
  apply(overrides, c);
  validate(c);
  return c;
}

std::vector<AlgorithmId> planned_algorithms(const RunConfig& c, const DatasetEntry& e) {
  const auto& base = e.algorithms.empty() ? c.algorithms : e.algorithms;
  std::vector<AlgorithmId> out;
  for (AlgorithmId a : base) {
    if (a == AlgorithmId::scripted || e.tasks.empty() ||
        std::find(e.tasks.begin(), e.tasks.end(), task_of(a)) != e.tasks.end()) {
      out.push_back(a);
    }
  }
  return out;
}

std::string rate_text(std::optional<double> rate) { return rate ? format_number(*rate) : "-"; }

}  // namespace

int cmd_validate_config(const std::filesystem::path& path, const Overrides& overrides, std::ostream& out) {
  const RunConfig c = load_config(path, overrides);
  const auto entries = load_datasets(c);
  for (const auto& e : entries) {
    CorruptionSpec probe;
    probe.rules = e.rules;
    probe.entity_key = e.entity_key;
    probe.corrupt_target_in_train = c.corrupt_target_in_train;
    for (ErrorType t : c.error_types) {
      probe.error_type = t;
      validate(probe, e.data.schema());
    }
    out << e.id << ": " << e.data.size() << " rows, " << e.data.schema().feature_count() << " features\n";
  }
  out << "config_hash " << config_hash(c) << "\n";
  return exit_ok;
}

int cmd_inject(const InjectArgs& args, std::ostream& out) {
  RunConfig c = load_run_config(args.config);
  apply(args.overrides, c);
  InjectConfig ic = c.inject.value_or(InjectConfig{});
  if (args.dataset) ic.dataset = *args.dataset;
  if (ic.dataset.empty() && c.datasets.size() == 1) ic.dataset = c.datasets.front().id;
  if (args.error_type) ic.error_type = error_type_from_string(*args.error_type);
  if (args.rate) ic.rate = *args.rate;
  if (args.overrides.seed) ic.seed = *args.overrides.seed;
  if (args.overrides.output_dir) ic.output_dir = *args.overrides.output_dir;
  c.inject = ic;
  validate(c);

  const auto it = std::find_if(c.datasets.begin(), c.datasets.end(), [&](const auto& d) { return d.id == ic.dataset; });
  const DatasetEntry entry = load_dataset_entry(*it);

  CorruptionSpec spec;
  spec.error_type = ic.error_type;
  spec.rate = ic.rate;
  spec.seed = ic.seed;
  spec.column_mask = ic.columns;
  spec.corrupt_target_in_train = c.corrupt_target_in_train;
  spec.rules = entry.rules;
  spec.entity_key = entry.entity_key;

  const Dataset dirty = inject(entry.data, spec);
  const InjectionSummary summary = summarize_injection(entry.data, dirty, spec);

  const std::string stem = entry.id + "__" + std::string(to_string(spec.error_type)) + "__r" +
                           format_number(spec.rate) + "__s" + std::to_string(spec.seed);
  const auto dirty_path = ic.output_dir / (stem + ".csv");
  const auto clean_path = ic.output_dir / (stem + ".clean.csv");
  write_text_file(dirty_path, to_delimited(dirty));

  std::vector<Record> shadow;
  shadow.reserve(dirty.size());
  for (std::size_t i = 0; i < dirty.size(); ++i) shadow.push_back(dirty.clean_row(i));
  write_text_file(clean_path, to_delimited(Dataset(dirty.schema(), std::move(shadow))));

  json j;
  j["dataset"] = entry.id;
  j["source_hash"] = content_hash(entry.data);
  j["output_hash"] = content_hash(dirty);
  j["error_type"] = std::string(to_string(spec.error_type));
  j["requested_rate"] = spec.rate;
  j["achieved_rate"] = summary.achieved_rate;
  j["changed"] = summary.changed;
  j["denominator"] = summary.denominator;
  j["rows_before"] = summary.rows_before;
  j["rows_after"] = summary.rows_after;
  j["seed"] = spec.seed;
  j["output"] = dirty_path.filename().string();
  j["clean_copy"] = clean_path.filename().string();
  write_text_file(ic.output_dir / (stem + ".summary.json"), j.dump(2) + "\n");
  write_text_file(ic.output_dir / "inject_summary.json", j.dump(2) + "\n");

  out << "wrote " << dirty_path.string() << " (" << summary.changed << "/" << summary.denominator
      << " changed, achieved rate " << format_number(summary.achieved_rate) << ")\n";
  return exit_ok;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& log) {
  const RunConfig c = load_config(args.config, args.overrides);
  const auto entries = load_datasets(c);
  const SweepConfig sweep = sweep_config(c);
  const std::size_t n_rates = c.grid.rates().size();

  std::size_t cells = 0;
  for (const auto& e : entries) cells += planned_algorithms(c, e).size() * c.error_types.size() * n_rates * c.repetitions;

  if (args.dry_run) {
    out << "config_hash " << sweep.config_hash << "\n";
    for (const auto& e : entries) {
      out << e.id << " (" << e.data.size() << " rows):";
      for (AlgorithmId a : planned_algorithms(c, e)) out << " " << to_string(a);
      out << "\n";
    }
    out << "rates " << n_rates << ", repetitions " << c.repetitions << ", folds " << c.folds << ", cells " << cells
        << "\n";
    return exit_ok;
  }

  ProgressFn progress;
  if (!args.quiet) progress = [&log](const std::string& line) { log << line << "\n"; };
  RobustnessReport report = run_sweep(entries, sweep, progress);

  write_report(report, c.output_dir);
  write_text_file(c.output_dir / "resolved_config.json", resolved_json(c));
  out << "wrote " << report.results.size() << " results to " << c.output_dir.string() << "\n";

  if (report.errors.empty()) return exit_ok;
  out << "\nfailed combinations:\n";
  out << std::left << std::setw(16) << "dataset" << std::setw(22) << "algorithm" << std::setw(14) << "error"
      << std::setw(8) << "rate"
      << "message\n";
  for (const auto& e : report.errors) {
    out << std::left << std::setw(16) << e.dataset << std::setw(22) << to_string(e.algorithm) << std::setw(14)
        << to_string(e.error_type) << std::setw(8) << rate_text(e.rate) << e.message << "\n";
  }
  return exit_partial;
}

int cmd_recommend(const RecommendArgs& args, std::ostream& out) {
  const RobustnessReport report = load_report(args.report);
  RecommendOptions o;
  o.task = task_from_string(args.task);
  o.small_rows = args.small_rows;
  o.large_rows = args.large_rows;
  if (args.measure) o.priority = measure_from_string(*args.measure);
  o.dataset = args.dataset_id;

  if (args.data) {
    LoadOptions lo;
    lo.target = args.target;
    lo.no_target = o.task == Task::clustering && !args.target;
    lo.entity_key = args.entity_key;
    const Dataset d = load_dataset(*args.data, lo);
    std::vector<FDRule> rules;
    if (args.rules) rules = load_fd_rules(*args.rules);
    DetectOptions det;
    det.inconsistent = !rules.empty();
    det.conflicting = !args.entity_key.empty();
    det.entity_key = args.entity_key;
    o.detected = detect_error_rates(d, rules, det);
    o.data_size = d.size();
  }
  if (args.missing) o.detected.missing = *args.missing;
  if (args.inconsistent) o.detected.inconsistent = *args.inconsistent;
  if (args.conflicting) o.detected.conflicting = *args.conflicting;
  if (args.size) o.data_size = *args.size;
  if (!args.data && !args.size) throw Error(ErrorCode::configuration, "recommend needs --size or --data");
  for (double r : {o.detected.missing, o.detected.inconsistent, o.detected.conflicting}) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::configuration, "error rates must lie in [0, 1]");
  }

  const Recommendation rec = recommend(report, o);
  out << to_text(rec);
  if (args.json_out) write_text_file(*args.json_out, recommendation_json(rec));
  return exit_ok;
}

}  // namespace dirtybench::app
