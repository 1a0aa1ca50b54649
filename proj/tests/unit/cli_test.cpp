#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "dirtybench/report_io.hpp"
#include "json.hpp"

using namespace dirtybench;
using namespace dirtybench::app;
namespace fs = std::filesystem;

namespace {

class Workdir {
 public:
  explicit Workdir(const std::string& name) : path_(fs::temp_directory_path() / ("dirtybench_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~Workdir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    write_text_file(path_ / name, text);
    return path_ / name;
  }

 private:
  fs::path path_;
};

std::string grid_csv() {
  std::string s = "a,b,c,d\n";
  for (int i = 0; i < 10; ++i) {
    s += std::to_string(i) + "," + std::to_string(i * 2) + "," + std::to_string(i + 10) + "," + std::to_string(i % 3) +
         "\n";
  }
  return s;
}

std::string inject_config(double rate) {
  nlohmann::json j = {
      {"datasets", {{{"id", "grid"}, {"path", "grid.csv"}, {"no_target", true}}}},
      {"algorithms", {"kmeans"}},
      {"inject", {{"dataset", "grid"}, {"error_type", "missing"}, {"rate", rate}, {"seed", 9}, {"output_dir", "out"}}}};
  return j.dump();
}

std::string sweep_config_text() {
  nlohmann::json j = {{"datasets",
                       {{{"id", "iris"},
                         {"path", std::string(DIRTYBENCH_DATA_DIR) + "/iris.csv"},
                         {"target", "species"},
                         {"tasks", {"classification"}}}}},
                      {"algorithms", {"knn", "naive_bayes"}},
                      {"grid", {{"start", 0.0}, {"step", 0.1}, {"steps", 2}}},
                      {"repetitions", 2},
                      {"folds", 3},
                      {"timing", false},
                      {"seed", 3},
                      {"output_dir", "out"}};
  return j.dump();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + DIRTYBENCH_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t empty_cells(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::size_t n = 0;
  while (std::getline(in, line)) {
    std::stringstream row(line + ",");
    for (std::string cell; std::getline(row, cell, ',');) n += cell.empty() ? 1 : 0;
  }
  return n;
}

}  // namespace

TEST(Config, ParsesAndRoundTrips) {
  Workdir w("config");
  const auto path = w.write("run.json", sweep_config_text());
  const RunConfig c = load_run_config(path);
  ASSERT_EQ(c.datasets.size(), 1u);
  EXPECT_EQ(c.datasets[0].tasks, std::vector<Task>{Task::classification});
  EXPECT_EQ(c.algorithms, (std::vector<AlgorithmId>{AlgorithmId::knn, AlgorithmId::naive_bayes}));
  EXPECT_EQ(c.grid.steps, 2u);
  EXPECT_EQ(c.folds, 3u);
  EXPECT_EQ(c.output_dir, w.path() / "out");
  const std::string resolved = resolved_json(c);
  const RunConfig back = parse_run_config(resolved);
  EXPECT_EQ(resolved_json(back), resolved);
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, HashIgnoresJobsAndOutput) {
  RunConfig c = parse_run_config(sweep_config_text(), "/tmp");
  const auto h = config_hash(c);
  c.jobs = 7;
  c.output_dir = "/elsewhere";
  EXPECT_EQ(config_hash(c), h);
  c.seed = 4;
  EXPECT_NE(config_hash(c), h);
}

TEST(Config, RejectsUnknownKeys) {
  auto j = nlohmann::json::parse(sweep_config_text());
  j["colour"] = "blue";
  EXPECT_THROW(parse_run_config(j.dump()), Error);
  j = nlohmann::json::parse(sweep_config_text());
  j["datasets"][0]["colour"] = "blue";
  EXPECT_THROW(parse_run_config(j.dump()), Error);
  j = nlohmann::json::parse(sweep_config_text());
  j["algorithms"] = {"quantum_forest"};
  EXPECT_THROW(parse_run_config(j.dump()), Error);
}

TEST(Config, ValidationCatchesBadSettings) {
  auto check = [](auto edit) {
    auto j = nlohmann::json::parse(sweep_config_text());
    edit(j);
    try {
      validate(parse_run_config(j.dump()));
    } catch (const Error& e) {
      return e.code() == ErrorCode::configuration;
    }
    return false;
  };
  EXPECT_TRUE(check([](auto& j) { j["algorithms"] = nlohmann::json::array(); }));
  EXPECT_TRUE(check([](auto& j) { j["datasets"] = nlohmann::json::array(); }));
  EXPECT_TRUE(check([](auto& j) { j["folds"] = 1; }));
  EXPECT_TRUE(check([](auto& j) { j["repetitions"] = 0; }));
  EXPECT_TRUE(check([](auto& j) { j["grid"]["step"] = 0.6; }));
  EXPECT_TRUE(check([](auto& j) { j["grid"]["start"] = 0.1; }));
  EXPECT_FALSE(check([](auto&) {}));
}

TEST(Config, OverridesWin) {
  RunConfig c = parse_run_config(sweep_config_text(), "/tmp");
  Overrides o;
  o.seed = 99;
  o.folds = 5;
  o.no_timing = true;
  o.algorithms = {"all"};
  apply(o, c);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.folds, 5u);
  EXPECT_GT(c.algorithms.size(), 2u);
}

TEST(Inject, RateZeroCopiesCanonicalInput) {
  Workdir w("inject0");
  w.write("grid.csv", grid_csv());
  const auto cfg = w.write("run.json", inject_config(0.0));
  std::ostringstream out;
  ASSERT_EQ(cmd_inject({cfg, {}, {}, {}, {}}, out), exit_ok);
  const auto written = read_text_file(w.path() / "out" / "grid__missing__r0__s9.csv");
  EXPECT_EQ(written, grid_csv());
  EXPECT_EQ(read_text_file(w.path() / "grid.csv"), grid_csv());
}

TEST(Inject, QuarterOfTenByFour) {
  Workdir w("inject25");
  w.write("grid.csv", grid_csv());
  const auto cfg = w.write("run.json", inject_config(0.25));
  std::ostringstream out;
  ASSERT_EQ(cmd_inject({cfg, {}, {}, {}, {}}, out), exit_ok);
  const auto summary = nlohmann::json::parse(read_text_file(w.path() / "out" / "inject_summary.json"));
  EXPECT_EQ(summary["changed"], 10);
  EXPECT_EQ(summary["denominator"], 40);
  const auto dirty = read_text_file(w.path() / "out" / summary["output"].get<std::string>());
  EXPECT_EQ(empty_cells(dirty), 10u);
  EXPECT_EQ(empty_cells(read_text_file(w.path() / "out" / summary["clean_copy"].get<std::string>())), 0u);

  const auto first = dirty;
  ASSERT_EQ(cmd_inject({cfg, {}, {}, {}, {}}, out), exit_ok);
  EXPECT_EQ(read_text_file(w.path() / "out" / summary["output"].get<std::string>()), first);
  EXPECT_EQ(read_text_file(w.path() / "grid.csv"), grid_csv());
}

TEST(Sweep, DryRunDoesNoWork) {
  Workdir w("dry");
  const auto cfg = w.write("run.json", sweep_config_text());
  std::ostringstream out, log;
  ASSERT_EQ(cmd_sweep({cfg, {}, true, true}, out, log), exit_ok);
  EXPECT_NE(out.str().find("cells 12"), std::string::npos) << out.str();
  EXPECT_FALSE(fs::exists(w.path() / "out"));
}

TEST(Sweep, SameSeedSameLedger) {
  Workdir w("ledger");
  const auto cfg = w.write("run.json", sweep_config_text());
  std::ostringstream out, log;
  ASSERT_EQ(cmd_sweep({cfg, {}, false, true}, out, log), exit_ok);
  const auto first = read_text_file(w.path() / "out" / "results.csv");
  Overrides o;
  o.output_dir = w.path() / "again";
  ASSERT_EQ(cmd_sweep({cfg, o, false, true}, out, log), exit_ok);
  EXPECT_EQ(read_text_file(w.path() / "again" / "results.csv"), first);

  // The emitted config reproduces the run.
  const auto resolved = w.path() / "out" / "resolved_config.json";
  ASSERT_TRUE(fs::exists(resolved));
  o.output_dir = w.path() / "third";
  ASSERT_EQ(cmd_sweep({resolved, o, false, true}, out, log), exit_ok);
  EXPECT_EQ(read_text_file(w.path() / "third" / "results.csv"), first);
  EXPECT_NE(first.find("config_hash=" + config_hash(load_run_config(cfg))), std::string::npos);
}

TEST(Sweep, PartialFailureExitCode) {
  Workdir w("partial");
  auto j = nlohmann::json::parse(sweep_config_text());
  j["algorithms"] = {"knn", "logistic_regression"};
  const auto cfg = w.write("run.json", j.dump());
  std::ostringstream out, log;
  EXPECT_EQ(cmd_sweep({cfg, {}, false, true}, out, log), exit_partial);
  EXPECT_NE(out.str().find("logistic_regression"), std::string::npos);
  EXPECT_TRUE(fs::exists(w.path() / "out" / "results.csv"));
}

TEST(Recommend, FromScriptedReport) {
  Workdir w("recommend");
  auto j = nlohmann::json::parse(sweep_config_text());
  j["algorithms"] = {"knn", "decision_tree"};
  const auto cfg = w.write("run.json", j.dump());
  std::ostringstream out, log;
  ASSERT_EQ(cmd_sweep({cfg, {}, false, true}, out, log), exit_ok);
  RecommendArgs args;
  args.report = w.path() / "out" / "report.json";
  args.missing = 0.3;
  args.size = 150;
  args.json_out = w.path() / "rec.json";
  std::ostringstream first, second;
  ASSERT_EQ(cmd_recommend(args, first), exit_ok);
  ASSERT_EQ(cmd_recommend(args, second), exit_ok);
  EXPECT_EQ(first.str(), second.str());
  const auto rec = nlohmann::json::parse(read_text_file(w.path() / "rec.json"));
  EXPECT_EQ(rec["task"], "classification");
  EXPECT_EQ(rec["cleaning_targets"].size(), 3u);
}

TEST(Binary, ExitCodes) {
  Workdir w("binary");
  const auto log = w.path() / "log.txt";
  const auto good = w.write("run.json", sweep_config_text());
  EXPECT_EQ(run_cli("validate-config \"" + good.string() + "\"", log), 0);
  EXPECT_EQ(run_cli("sweep --dry-run \"" + good.string() + "\"", log), 0);
  EXPECT_NE(read_text_file(log).find("cells"), std::string::npos);

  auto j = nlohmann::json::parse(sweep_config_text());
  j["algorithms"] = nlohmann::json::array();
  const auto empty = w.write("empty.json", j.dump());
  EXPECT_EQ(run_cli("sweep \"" + empty.string() + "\"", log), 2);
  EXPECT_FALSE(fs::exists(w.path() / "out"));

  EXPECT_EQ(run_cli("sweep --bogus-flag \"" + good.string() + "\"", log), 2);
  EXPECT_EQ(run_cli("validate-config \"" + (w.path() / "nope.json").string() + "\"", log), 4);
  j = nlohmann::json::parse(sweep_config_text());
  j["datasets"][0]["path"] = (w.path() / "missing.csv").string();
  const auto missing = w.write("missing.json", j.dump());
  EXPECT_EQ(run_cli("validate-config \"" + missing.string() + "\"", log), 4);
  EXPECT_EQ(run_cli("recommend --report \"" + (w.path() / "none.json").string() + "\"", log), 4);
}
