#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "dirtybench/error.hpp"
#include "dirtybench/report_io.hpp"
#include "fixtures.hpp"
#include "json.hpp"

using namespace dirtybench;
namespace fs = std::filesystem;

namespace {

RobustnessReport small_report() {
  SweepConfig c;
  c.algorithms = {AlgorithmId::knn, AlgorithmId::kmeans, AlgorithmId::least_squares};
  c.grid = {0.0, 0.1, 2};
  c.repetitions = 2;
  c.eval.folds = 3;
  c.seed = 5;
  c.config_hash = "abc123";
  std::vector<DatasetEntry> data(2);
  data[0].id = "cls";
  data[0].data = dirtybench::testing::blobs(30, 2, 2, 4);
  data[0].tasks = {Task::classification, Task::clustering};
  data[1].id = "reg";
  data[1].data = dirtybench::testing::linear_data(30, 2, 4);
  data[1].tasks = {Task::regression};
  return run_sweep(data, c);
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t count(const std::string& s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

}  // namespace

TEST(ReportIo, ProvenanceLine) {
  const auto r = small_report();
  EXPECT_EQ(provenance_line(r), "# dirtybench config_hash=abc123 root_seed=5");
  RobustnessReport empty;
  EXPECT_EQ(provenance_line(empty), "# dirtybench config_hash=none root_seed=0");
}

TEST(ReportIo, LedgerHasOneRowPerCell) {
  const auto r = small_report();
  const auto l = lines(results_ledger(r));
  ASSERT_EQ(l.size(), r.results.size() + 2);
  EXPECT_EQ(l[0], provenance_line(r));
  EXPECT_EQ(l[1],
            "dataset,algorithm,task,error_type,rate,seed,precision,recall,f_measure,rmsd,nrmsd,cv_rmsd,time_log10_ms,"
            "flags");
  // 3 rates x 2 repetitions x (knn, kmeans on cls, least squares on reg)
  EXPECT_EQ(r.results.size(), 18u);
  for (std::size_t i = 2; i < l.size(); ++i) EXPECT_EQ(count(l[i], ','), 13u) << l[i];
}

TEST(ReportIo, LedgerLeavesAbsentMeasuresEmpty) {
  const auto r = small_report();
  for (const auto& line : lines(results_ledger(r))) {
    if (line.rfind("reg,", 0) == 0) EXPECT_NE(line.find(",,,"), std::string::npos);
  }
}

TEST(ReportIo, Tables) {
  const auto r = small_report();
  const auto prf = lines(sensibility_table(r, false));
  ASSERT_GE(prf.size(), 4u);
  EXPECT_EQ(prf[0], provenance_line(r));
  EXPECT_EQ(prf[1], "algorithm,task,missing_precision,missing_recall,missing_f_measure");
  EXPECT_EQ(prf[2].rfind("knn,classification,", 0), 0u);
  const auto reg = lines(keeping_point_table(r, true));
  ASSERT_EQ(reg.size(), 3u);
  EXPECT_EQ(reg[1], "algorithm,task,missing_rmsd,missing_nrmsd,missing_cv_rmsd");
  EXPECT_EQ(reg[2].rfind("least_squares,regression,", 0), 0u);
}

TEST(ReportIo, JsonRoundTrip) {
  const auto r = small_report();
  const auto text = report_json(r);
  const auto back = parse_report_json(text);
  EXPECT_EQ(report_json(back), text);
  EXPECT_EQ(back.results.size(), r.results.size());
  EXPECT_EQ(back.series.size(), r.series.size());
  EXPECT_EQ(back.config_hash, "abc123");
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    EXPECT_EQ(back.results[i].precision, r.results[i].precision);
    EXPECT_EQ(back.results[i].rmsd, r.results[i].rmsd);
  }
  EXPECT_THROW(parse_report_json("{not json"), Error);
  EXPECT_THROW(parse_report_json("{}"), Error);
}

TEST(ReportIo, WritesReportDirectory) {
  const auto r = small_report();
  const fs::path dir = fs::temp_directory_path() / "dirtybench_report_io_test";
  fs::remove_all(dir);
  write_report(r, dir);
  for (const char* f : {"results.csv", "sensibility_prf.csv", "keeping_point_prf.csv", "sensibility_regression.csv",
                        "keeping_point_regression.csv", "report.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::size_t plots = 0;
  for (const auto& e : fs::directory_iterator(dir / "plots")) {
    (void)e;
    ++plots;
  }
  EXPECT_EQ(plots, r.series.size());
  const auto& s = r.series.front();
  const auto plot = lines(read_text_file(dir / "plots" / plot_file_name(s)));
  ASSERT_EQ(plot.size(), 2 + s.series.rates.size());
  EXPECT_EQ(plot[1], "rate,value");
  EXPECT_EQ(load_report(dir / "report.json").results.size(), r.results.size());
  fs::remove_all(dir);
  EXPECT_THROW(read_text_file(dir / "missing.csv"), Error);
}

TEST(ReportIo, PlotFileNamesAreSafe) {
  SeriesSummary s;
  s.dataset = "a b/c";
  s.algorithm = AlgorithmId::knn;
  s.measure = Measure::recall;
  EXPECT_EQ(plot_file_name(s), "a_b_c__knn__missing__recall.csv");
}

TEST(ReportIo, RecommendationJson) {
  Recommendation rec;
  rec.reason = "no acceptable algorithm";
  const auto j = nlohmann::json::parse(recommendation_json(rec));
  EXPECT_TRUE(j["chosen"].is_null());
  EXPECT_EQ(j["reason"], "no acceptable algorithm");
  rec.chosen = AlgorithmId::dbscan;
  EXPECT_EQ(nlohmann::json::parse(recommendation_json(rec))["chosen"], "dbscan");
}
