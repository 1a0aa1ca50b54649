#include "dirtybench/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dirtybench/error.hpp"

namespace dirtybench {

using nlohmann::json;

namespace {

const ErrorType kErrorTypes[] = {ErrorType::missing, ErrorType::inconsistent, ErrorType::conflicting};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::vector<ErrorType> error_types_in(const RobustnessReport& report) {
  std::vector<ErrorType> out;
  for (ErrorType e : kErrorTypes) {
    for (const auto& s : report.summaries) {
      if (s.error_type == e) {
        out.push_back(e);
        break;
      }
    }
  }
  return out;
}

std::string table(const RobustnessReport& report, bool regression, bool keeping) {
  std::ostringstream out;
  out << provenance_line(report) << "\n";
  const auto errors = error_types_in(report);
  const auto& measures = measures_for(regression ? Task::regression : Task::classification);
  out << "algorithm,task";
  for (ErrorType e : errors) {
    for (Measure m : measures) out << ',' << to_string(e) << '_' << to_string(m);
  }
  out << '\n';
  std::vector<std::pair<AlgorithmId, Task>> rows;
  for (const auto& s : report.summaries) {
    if ((s.task == Task::regression) != regression) continue;
    std::pair<AlgorithmId, Task> key{s.algorithm, s.task};
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
  }
  for (const auto& [a, t] : rows) {
    out << to_string(a) << ',' << to_string(t);
    for (ErrorType e : errors) {
      for (Measure m : measures) {
        out << ',';
        for (const auto& s : report.summaries) {
          if (s.algorithm != a || s.error_type != e || s.measure != m) continue;
          const auto& v = keeping ? s.mean_keeping_point : s.mean_sensibility;
          if (!v) break;
          const bool in_percent = !regression || keeping;
          out << (in_percent ? fixed(*v * 100.0, 2) : fixed(*v, 4));
          break;
        }
      }
    }
    out << '\n';
  }
  return out.str();
}

json result_json(const EvalResult& r) {
  json j;
  j["dataset"] = r.dataset;
  j["algorithm"] = std::string(to_string(r.algorithm));
  j["task"] = std::string(to_string(r.task));
  j["error_type"] = std::string(to_string(r.error_type));
  j["rate"] = r.rate;
  j["seed"] = r.seed;
  j["precision"] = opt_json(r.precision);
  j["recall"] = opt_json(r.recall);
  j["f_measure"] = opt_json(r.f_measure);
  j["rmsd"] = opt_json(r.rmsd);
  j["nrmsd"] = opt_json(r.nrmsd);
  j["cv_rmsd"] = opt_json(r.cv_rmsd);
  j["time_log10_ms"] = opt_json(r.time_log10_ms);
  j["flags"] = r.flags;
  return j;
}

EvalResult result_from(const json& j) {
  EvalResult r;
  r.dataset = j.at("dataset").get<std::string>();
  r.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  r.task = task_from_string(j.at("task").get<std::string>());
  r.error_type = error_type_from_string(j.at("error_type").get<std::string>());
  r.rate = j.at("rate").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.precision = opt_from(j, "precision");
  r.recall = opt_from(j, "recall");
  r.f_measure = opt_from(j, "f_measure");
  r.rmsd = opt_from(j, "rmsd");
  r.nrmsd = opt_from(j, "nrmsd");
  r.cv_rmsd = opt_from(j, "cv_rmsd");
  r.time_log10_ms = opt_from(j, "time_log10_ms");
  r.flags = j.value("flags", std::vector<std::string>{});
  return r;
}

}  // namespace

std::string provenance_line(const RobustnessReport& report) {
  return "# dirtybench config_hash=" + (report.config_hash.empty() ? std::string("none") : report.config_hash) +
         " root_seed=" + std::to_string(report.root_seed);
}

std::string results_ledger(const RobustnessReport& report) {
  std::ostringstream out;
  out << provenance_line(report) << "\n";
  out << "dataset,algorithm,task,error_type,rate,seed,precision,recall,f_measure,rmsd,nrmsd,cv_rmsd,time_log10_ms,flags\n";
  for (const auto& r : report.results) {
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    out << r.dataset << ',' << to_string(r.algorithm) << ',' << to_string(r.task) << ',' << to_string(r.error_type)
        << ',' << format_number(r.rate) << ',' << r.seed << ',' << opt(r.precision) << ',' << opt(r.recall) << ','
        << opt(r.f_measure) << ',' << opt(r.rmsd) << ',' << opt(r.nrmsd) << ',' << opt(r.cv_rmsd) << ','
        << (r.time_log10_ms ? fixed(*r.time_log10_ms, 4) : std::string()) << ',' << flags << '\n';
  }
  return out.str();
}

std::string sensibility_table(const RobustnessReport& report, bool regression) {
  return table(report, regression, false);
}

std::string keeping_point_table(const RobustnessReport& report, bool regression) {
  return table(report, regression, true);
}

std::string series_csv(const RobustnessReport& report, const SeriesSummary& series) {
  std::ostringstream out;
  out << provenance_line(report) << "\nrate,value\n";
  for (std::size_t i = 0; i < series.series.rates.size(); ++i) {
    out << format_number(series.series.rates[i]) << ',' << format_number(series.series.values[i]) << '\n';
  }
  return out.str();
}

std::string plot_file_name(const SeriesSummary& s) {
  std::string name = s.dataset + "__" + std::string(to_string(s.algorithm)) + "__" +
                     std::string(to_string(s.error_type)) + "__" + std::string(to_string(s.measure)) + ".csv";
  for (char& c : name) {
    if (c == '/' || c == '\\' || c == ' ') c = '_';
  }
  return name;
}

std::string report_json(const RobustnessReport& report) {
  json j;
  j["config_hash"] = report.config_hash;
  j["root_seed"] = report.root_seed;
  j["rates"] = report.rates;
  j["k_prf"] = report.k_prf;
  j["k_regression"] = report.k_regression;
  j["results"] = json::array();
  for (const auto& r : report.results) j["results"].push_back(result_json(r));
  j["series"] = json::array();
  for (const auto& s : report.series) {
    json o;
    o["dataset"] = s.dataset;
    o["algorithm"] = std::string(to_string(s.algorithm));
    o["task"] = std::string(to_string(s.task));
    o["error_type"] = std::string(to_string(s.error_type));
    o["measure"] = std::string(to_string(s.measure));
    o["rates"] = s.series.rates;
    o["values"] = s.series.values;
    o["sensibility"] = opt_json(s.sensibility);
    o["keeping_point"] = opt_json(s.keeping_point);
    o["notes"] = s.notes;
    j["series"].push_back(std::move(o));
  }
  j["summaries"] = json::array();
  for (const auto& s : report.summaries) {
    json o;
    o["algorithm"] = std::string(to_string(s.algorithm));
    o["task"] = std::string(to_string(s.task));
    o["error_type"] = std::string(to_string(s.error_type));
    o["measure"] = std::string(to_string(s.measure));
    o["mean_sensibility"] = opt_json(s.mean_sensibility);
    o["mean_keeping_point"] = opt_json(s.mean_keeping_point);
    o["mean_clean_value"] = opt_json(s.mean_clean_value);
    o["datasets"] = s.datasets;
    j["summaries"].push_back(std::move(o));
  }
  j["rankings"] = json::array();
  for (const auto& r : report.rankings) {
    json o;
    o["task"] = std::string(to_string(r.task));
    o["error_type"] = std::string(to_string(r.error_type));
    o["measure"] = std::string(to_string(r.measure));
    std::vector<std::string> order;
    for (AlgorithmId a : r.order) order.emplace_back(to_string(a));
    o["most_sensitive_first"] = order;
    j["rankings"].push_back(std::move(o));
  }
  j["errors"] = json::array();
  for (const auto& e : report.errors) {
    json o;
    o["dataset"] = e.dataset;
    o["algorithm"] = std::string(to_string(e.algorithm));
    o["error_type"] = std::string(to_string(e.error_type));
    o["rate"] = opt_json(e.rate);
    o["message"] = e.message;
    j["errors"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

RobustnessReport parse_report_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("report is not valid JSON: ") + e.what());
  }
  try {
    RobustnessReport r;
    r.config_hash = j.value("config_hash", std::string());
    r.root_seed = j.value("root_seed", std::uint64_t{0});
    r.rates = j.at("rates").get<std::vector<double>>();
    r.k_prf = j.value("k_prf", 0.10);
    r.k_regression = j.value("k_regression", 0.1);
    for (const auto& o : j.value("results", json::array())) r.results.push_back(result_from(o));
    for (const auto& o : j.value("errors", json::array())) {
      CombinationError e;
      e.dataset = o.at("dataset").get<std::string>();
      e.algorithm = algorithm_from_string(o.at("algorithm").get<std::string>());
      e.error_type = error_type_from_string(o.at("error_type").get<std::string>());
      e.rate = opt_from(o, "rate");
      e.message = o.value("message", std::string());
      r.errors.push_back(std::move(e));
    }
    for (const auto& o : j.value("series", json::array())) {
      SeriesSummary s;
      s.dataset = o.at("dataset").get<std::string>();
      s.algorithm = algorithm_from_string(o.at("algorithm").get<std::string>());
      s.task = task_from_string(o.at("task").get<std::string>());
      s.error_type = error_type_from_string(o.at("error_type").get<std::string>());
      s.measure = measure_from_string(o.at("measure").get<std::string>());
      s.series.rates = o.at("rates").get<std::vector<double>>();
      s.series.values = o.at("values").get<std::vector<double>>();
      s.series.direction = higher_is_better(s.measure) ? Direction::higher_better : Direction::lower_better;
      s.sensibility = opt_from(o, "sensibility");
      s.keeping_point = opt_from(o, "keeping_point");
      s.notes = o.value("notes", std::vector<std::string>{});
      r.series.push_back(std::move(s));
    }
    for (const auto& o : j.value("summaries", json::array())) {
      AlgorithmSummary s;
      s.algorithm = algorithm_from_string(o.at("algorithm").get<std::string>());
      s.task = task_from_string(o.at("task").get<std::string>());
      s.error_type = error_type_from_string(o.at("error_type").get<std::string>());
      s.measure = measure_from_string(o.at("measure").get<std::string>());
      s.mean_sensibility = opt_from(o, "mean_sensibility");
      s.mean_keeping_point = opt_from(o, "mean_keeping_point");
      s.mean_clean_value = opt_from(o, "mean_clean_value");
      s.datasets = o.value("datasets", std::size_t{0});
      r.summaries.push_back(s);
    }
    for (const auto& o : j.value("rankings", json::array())) {
      Ranking k;
      k.task = task_from_string(o.at("task").get<std::string>());
      k.error_type = error_type_from_string(o.at("error_type").get<std::string>());
      k.measure = measure_from_string(o.at("measure").get<std::string>());
      for (const auto& a : o.at("most_sensitive_first")) k.order.push_back(algorithm_from_string(a.get<std::string>()));
      r.rankings.push_back(std::move(k));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema, std::string("malformed report: ") + e.what());
  }
}

RobustnessReport load_report(const std::filesystem::path& path) { return parse_report_json(read_text_file(path)); }

void write_report(const RobustnessReport& report, const std::filesystem::path& directory) {
  write_text_file(directory / "results.csv", results_ledger(report));
  write_text_file(directory / "sensibility_prf.csv", sensibility_table(report, false));
  write_text_file(directory / "keeping_point_prf.csv", keeping_point_table(report, false));
  write_text_file(directory / "sensibility_regression.csv", sensibility_table(report, true));
  write_text_file(directory / "keeping_point_regression.csv", keeping_point_table(report, true));
  write_text_file(directory / "report.json", report_json(report));
  for (const auto& s : report.series) write_text_file(directory / "plots" / plot_file_name(s), series_csv(report, s));
}

std::string recommendation_json(const Recommendation& rec) {
  json j;
  j["task"] = std::string(to_string(rec.task));
  j["priority_measure"] = std::string(to_string(rec.priority));
  j["detected"] = {{"missing", rec.detected.missing},
                   {"inconsistent", rec.detected.inconsistent},
                   {"conflicting", rec.detected.conflicting}};
  j["data_size"] = rec.data_size;
  j["candidates"] = json::array();
  for (const auto& [a, v] : rec.candidates) j["candidates"].push_back({{"algorithm", to_string(a)}, {"clean_value", v}});
  j["nearest_misses"] = json::array();
  for (const auto& [a, v] : rec.nearest_misses) {
    j["nearest_misses"].push_back({{"algorithm", to_string(a)}, {"clean_value", v}});
  }
  j["dominant_error_type"] = std::string(to_string(rec.dominant));
  j["chosen"] = rec.chosen ? json(std::string(to_string(*rec.chosen))) : json(nullptr);
  j["reason"] = rec.reason;
  j["cleaning_targets"] = json::array();
  for (const auto& t : rec.targets) {
    j["cleaning_targets"].push_back({{"error_type", to_string(t.error_type)},
                                     {"detected", t.detected},
                                     {"keeping_point", opt_json(t.keeping_point)},
                                     {"clean_to", opt_json(t.clean_to)}});
  }
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace dirtybench
