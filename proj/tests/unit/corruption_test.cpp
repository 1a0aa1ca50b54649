#include <gtest/gtest.h>

#include <sstream>

#include "dirtybench/corruption.hpp"
#include "dirtybench/error.hpp"
#include "fixtures.hpp"

using namespace dirtybench;
using dirtybench::testing::table;

namespace {

/// Rows with a group id that determines a name, a numeric value and a label.
Dataset grouped(std::size_t n, std::size_t groups) {
  std::ostringstream s;
  s << "gid,name,value,label\n";
  for (std::size_t i = 0; i < n; ++i) {
    s << "g" << i % groups << ",n" << i % groups << "," << i * 0.5 << "," << (i % 3 == 0 ? "a" : "b") << "\n";
  }
  return table(s.str());
}

std::size_t count_missing(const Dataset& d) {
  std::size_t n = 0;
  for (const auto& r : d.rows()) {
    for (const auto& c : r.cells) n += is_missing(c) ? 1 : 0;
  }
  return n;
}

CorruptionSpec spec_of(ErrorType type, double rate, std::uint64_t seed) {
  CorruptionSpec s;
  s.error_type = type;
  s.rate = rate;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(InjectMissing, RateZeroIsIdentity) {
  const Dataset d = dirtybench::testing::blobs(20, 3, 2, 1);
  const Dataset out = inject_missing(d, spec_of(ErrorType::missing, 0.0, 4));
  EXPECT_EQ(out.rows(), d.rows());
}

TEST(InjectMissing, ExactCellCount) {
  const Dataset d = dirtybench::testing::blobs(10, 4, 2, 2);
  const Dataset out = inject_missing(d, spec_of(ErrorType::missing, 0.25, 8));
  EXPECT_EQ(count_missing(out), 10u);
  const auto summary = summarize_injection(d, out, spec_of(ErrorType::missing, 0.25, 8));
  EXPECT_EQ(summary.changed, 10u);
  EXPECT_EQ(summary.denominator, 40u);
}

TEST(InjectMissing, DeterministicPerSeed) {
  const Dataset d = dirtybench::testing::blobs(40, 3, 2, 2);
  const auto s = spec_of(ErrorType::missing, 0.3, 21);
  EXPECT_EQ(to_delimited(inject(d, s)), to_delimited(inject(d, s)));
  EXPECT_NE(to_delimited(inject(d, s)), to_delimited(inject(d, spec_of(ErrorType::missing, 0.3, 22))));
}

TEST(InjectMissing, RespectsColumnMaskAndTarget) {
  const Dataset d = dirtybench::testing::blobs(50, 3, 2, 2);
  auto s = spec_of(ErrorType::missing, 0.9, 5);
  s.column_mask = {"x1"};
  const Dataset out = inject(d, s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out.row(i).cells[0], d.row(i).cells[0]);
    EXPECT_EQ(out.row(i).cells[2], d.row(i).cells[2]);
    EXPECT_EQ(out.row(i).cells[3], d.row(i).cells[3]);
  }
  s.column_mask.clear();
  const Dataset all = inject(d, s);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all.row(i).cells[3], d.row(i).cells[3]);
  s.corrupt_target_in_train = true;
  const Dataset with_target = inject(d, s);
  std::size_t target_missing = 0;
  for (const auto& r : with_target.rows()) target_missing += is_missing(r.cells[3]) ? 1 : 0;
  EXPECT_GT(target_missing, 0u);
}

TEST(InjectMissing, NoEligibleCells) {
  const Dataset d = dirtybench::testing::blobs(5, 1, 2, 2);
  auto s = spec_of(ErrorType::missing, 0.5, 1);
  s.column_mask = {"label"};
  try {
    inject(d, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::configuration);
  }
}

TEST(InjectInconsistent, StudentRuleViolation) {
  const Dataset d = dirtybench::testing::student_table(false);
  auto s = spec_of(ErrorType::inconsistent, 0.25, 3);
  s.rules = parse_fd_rules("StudentNo -> Name");
  const Dataset out = inject(d, s);
  DetectOptions o;
  o.inconsistent = true;
  EXPECT_GE(detect_error_rates(out, s.rules, o).inconsistent, 0.5);
  EXPECT_EQ(out.clean_shadow(), d.clean_shadow());
}

TEST(InjectInconsistent, HalfOfHundredRows) {
  const Dataset d = grouped(100, 20);
  auto s = spec_of(ErrorType::inconsistent, 0.5, 11);
  s.rules = parse_fd_rules("gid -> name");
  DetectOptions o;
  o.inconsistent = true;
  EXPECT_EQ(detect_error_rates(d, s.rules, o).inconsistent, 0.0);
  const Dataset out = inject(d, s);
  EXPECT_GE(detect_error_rates(out, s.rules, o).inconsistent, 0.49);
  s.rate = 0.0;
  EXPECT_EQ(inject(d, s).rows(), d.rows());
}

TEST(InjectInconsistent, FabricatesPartnerForSingletons) {
  const Dataset d = grouped(30, 30);
  auto s = spec_of(ErrorType::inconsistent, 0.2, 4);
  s.rules = parse_fd_rules("gid -> name");
  const Dataset out = inject(d, s);
  DetectOptions o;
  o.inconsistent = true;
  EXPECT_GE(detect_error_rates(out, s.rules, o).inconsistent * static_cast<double>(out.size()), 6.0 - 1.0);
}

TEST(InjectInconsistent, SingleValueDomainIsImpossible) {
  const Dataset d = table("a,b,label\n1,z,p\n1,z,q\n2,z,p\n");
  auto s = spec_of(ErrorType::inconsistent, 0.5, 1);
  s.rules = parse_fd_rules("a -> b");
  try {
    inject(d, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::injection_impossible);
  }
}

TEST(InjectConflicting, StudentConflict) {
  LoadOptions lo;
  lo.no_target = true;
  lo.entity_key = {"StudentNo", "Name"};
  // Student table with Bob's two rows agreeing, so it starts conflict-free.
  const Dataset d = table("StudentNo,Name,City,Country\n170302,Alice,NYC,US\n170303,Steven,LA,FR\n"
                          "170304,Bob,NYC,U.S.A\n170304,Bob,NYC,U.S.A\n",
                          lo);
  DetectOptions o;
  o.conflicting = true;
  EXPECT_EQ(detect_error_rates(d, {}, o).conflicting, 0.0);
  const Dataset out = inject(d, spec_of(ErrorType::conflicting, 0.5, 2));
  EXPECT_GE(detect_error_rates(out, {}, o).conflicting * static_cast<double>(out.size()), 2.0);
  EXPECT_GE(detect_error_rates(out, {}, o).conflicting, 0.5 - 1.0 / 4.0);
}

TEST(InjectConflicting, DetectorLowerBound) {
  for (double rate : {0.1, 0.3, 0.5}) {
    const Dataset d = grouped(80, 80);
    auto s = spec_of(ErrorType::conflicting, rate, 6);
    s.entity_key = {"gid", "name"};
    const Dataset out = inject(d, s);
    DetectOptions o;
    o.conflicting = true;
    o.entity_key = s.entity_key;
    EXPECT_GE(detect_error_rates(out, {}, o).conflicting, rate - 1.0 / 80.0);
  }
}

TEST(InjectConflicting, AllKeyColumns) {
  const Dataset d = table("a,label\n1,x\n2,y\n");
  auto s = spec_of(ErrorType::conflicting, 0.5, 1);
  s.entity_key = {"a"};
  EXPECT_THROW(inject(d, s), Error);
}

TEST(Corruption, RateAccuracyAndComposition) {
  const Dataset d = grouped(200, 40);
  const auto rules = parse_fd_rules("gid -> name");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto a = spec_of(ErrorType::inconsistent, 0.2, seed);
    a.rules = rules;
    const Dataset first = inject(d, a);
    const auto sa = summarize_injection(d, first, a);
    EXPECT_LE(std::abs(sa.achieved_rate - 0.2), 1.0 / 200.0 + 1e-12);

    auto b = spec_of(ErrorType::missing, 0.1, seed + 100);
    b.column_mask = {"value"};
    const Dataset both = inject(first, b);
    DetectOptions o;
    o.inconsistent = true;
    o.columns = {"value"};
    const ErrorRates r = detect_error_rates(both, rules, o);
    EXPECT_GE(r.inconsistent, 0.2 - 1.0 / 200.0);
    EXPECT_NEAR(r.missing, 0.1, 1.0 / static_cast<double>(both.size()));
  }
}

TEST(Impute, MeanAndMode) {
  const Dataset d = table("x,c,label\n1,a,p\n,a,q\n3,b,p\n2,,q\n");
  const Dataset out = impute(d);
  EXPECT_EQ(std::get<double>(out.row(1).cells[0]), 2.0);
  EXPECT_EQ(std::get<std::string>(out.row(3).cells[1]), "a");
  const Dataset clean = table("x,label\n1,p\n2,q\n");
  EXPECT_EQ(impute(clean).rows(), clean.rows());
}

TEST(Impute, ModeTieGoesToFirstSeen) {
  const Dataset d = table("x,c,label\n1,b,p\n2,a,q\n3,,p\n4,a,p\n5,b,q\n");
  EXPECT_EQ(std::get<std::string>(impute(d).row(2).cells[1]), "b");
}

TEST(Impute, FullyMissingColumn) {
  const Dataset d = table("x,c,label\n,a,p\n,b,q\n");
  try {
    impute(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::imputation_impossible);
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }
}

TEST(Impute, FitOnOneApplyToAnother) {
  const Dataset train = table("x,label\n2,p\n4,q\n");
  const Dataset test = table("x,label\n,p\n7,q\n");
  const Dataset out = Imputer::fit(train).apply(test);
  EXPECT_EQ(std::get<double>(out.row(0).cells[0]), 3.0);
  EXPECT_EQ(std::get<double>(out.row(1).cells[0]), 7.0);
}
