#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dirtybench/robustness.hpp"

namespace dirtybench {

/// `# dirtybench config_hash=<hash> root_seed=<seed>`
std::string provenance_line(const RobustnessReport& report);

/// One line per evaluated cell: dataset, algorithm, task, error_type, rate,
/// seed, precision, recall, f_measure, rmsd, nrmsd, cv_rmsd, time_log10_ms,
/// flags. Absent measures are empty fields.
std::string results_ledger(const RobustnessReport& report);

/// Algorithm x (error type x measure) table of mean sensibility across
/// datasets. P/R/F tables are in percent.
std::string sensibility_table(const RobustnessReport& report, bool regression);
std::string keeping_point_table(const RobustnessReport& report, bool regression);

/// `rate,value` rows of one series.
std::string series_csv(const RobustnessReport& report, const SeriesSummary& series);
std::string plot_file_name(const SeriesSummary& series);

std::string report_json(const RobustnessReport& report);
RobustnessReport parse_report_json(std::string_view text);
RobustnessReport load_report(const std::filesystem::path& path);

/// Writes results.csv, sensibility/keeping-point tables, report.json and
/// plots/ under `directory`.
void write_report(const RobustnessReport& report, const std::filesystem::path& directory);

std::string recommendation_json(const Recommendation& recommendation);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace dirtybench
