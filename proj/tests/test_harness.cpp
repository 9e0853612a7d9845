#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "lipnorm/error.hpp"
#include "lipnorm/harness.hpp"
#include "lipnorm/json_io.hpp"

using namespace lipnorm;
using namespace lipnorm::harness;

namespace {

CheckOptions small(int trials) {
  CheckOptions o;
  o.trials = trials;
  return o;
}

CheckReport with_verdict(const std::string& check, Verdict v) {
  CheckReport r;
  r.check = check;
  r.verdict = v;
  return r;
}

}  // namespace

TEST(Harness, IsometryTrialsPassAndCarryTheirSeeds) {
  const auto reports = check_linearization_isometry(small(12));
  ASSERT_EQ(reports.size(), 12u);
  std::set<unsigned long long> seeds;
  for (const auto& r : reports) {
    EXPECT_EQ(r.verdict, Verdict::Pass) << r.instance << " " << r.note;
    EXPECT_EQ(r.brackets.size(), 2u);
    EXPECT_TRUE(r.certificates.ok);
    seeds.insert(r.seed);
  }
  EXPECT_EQ(seeds.size(), reports.size());
  EXPECT_NE(reports.front().instance.find("zero map"), std::string::npos);
}

TEST(Harness, GrowthScanPasses) {
  const auto reports = scan_dirac_growth(1, 5, CheckOptions{});
  ASSERT_EQ(reports.size(), 5u);
  for (const auto& r : reports) EXPECT_EQ(r.verdict, Verdict::Pass) << r.instance;
  EXPECT_TRUE(suite_ok(reports));
}

TEST(Harness, SmallRunsOfTheOtherChecks) {
  for (const char* suite : {"thm35", "cor314", "prop38"}) {
    const auto reports = run_suite(suite, small(3));
    ASSERT_EQ(reports.size(), 3u) << suite;
    for (const auto& r : reports) {
      EXPECT_NE(r.verdict, Verdict::Fail) << suite << " #" << r.trial << " " << r.note;
      EXPECT_TRUE(r.certificates.ok);
    }
  }
}

TEST(Harness, ReportsAreIndependentOfThreadCount) {
  CheckOptions a = small(4), b = small(4);
  b.threads = 3;
  const Json ja = report_json(run_suite("thm35", a), {{"seed", 1}});
  const Json jb = report_json(run_suite("thm35", b), {{"seed", 1}});
  EXPECT_EQ(dump_deterministic(ja), dump_deterministic(jb));
}

TEST(Harness, SeedChangesTheInstances) {
  CheckOptions a = small(3), b = small(3);
  b.seed = a.seed + 1;
  const auto ra = check_linearization_isometry(a), rb = check_linearization_isometry(b);
  EXPECT_NE(ra[1].seed, rb[1].seed);
}

TEST(Harness, InconclusiveShareRule) {
  std::vector<CheckReport> r(10, with_verdict("x", Verdict::Pass));
  r[0].verdict = Verdict::Inconclusive;
  EXPECT_TRUE(suite_ok(r));  // 1 of 10
  r[1].verdict = Verdict::Inconclusive;
  EXPECT_FALSE(suite_ok(r));  // 2 of 10
  r[1].verdict = Verdict::Fail;
  r[0].verdict = Verdict::Pass;
  EXPECT_FALSE(suite_ok(r));
  const Summary s = summarize(r);
  EXPECT_EQ(s.pass, 9);
  EXPECT_EQ(s.fail, 1);
}

TEST(Harness, InconclusiveShareIsJudgedPerCheck) {
  // 1 of 5 inconclusive in "a" is 20% even though the whole run has 1 of 20.
  std::vector<CheckReport> r(5, with_verdict("a", Verdict::Pass));
  r[0].verdict = Verdict::Inconclusive;
  for (int i = 0; i < 15; ++i) r.push_back(with_verdict("b", Verdict::Pass));
  EXPECT_FALSE(suite_ok(r));
}

TEST(Harness, OutputFormats) {
  const auto reports = check_linearization_isometry(small(2));
  const Json j = report_json(reports, {{"suite", "isometry"}});
  EXPECT_TRUE(j.at("ok").get<bool>());
  EXPECT_EQ(j.at("checks").size(), 2u);
  EXPECT_TRUE(j.at("checks")[0].contains("brackets"));
  EXPECT_EQ(j.at("summary").at("isometry").at("pass").get<int>(), 2);
  const std::string text = report_text(reports);
  EXPECT_NE(text.find("[PASS] isometry #0"), std::string::npos);
  const std::string csv = report_csv(reports);
  EXPECT_EQ(csv.rfind("check,trial,seed,verdict,bracket", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 2);
}

TEST(Harness, UnknownSuite) { EXPECT_THROW(run_suite("nope", small(1)), InputError); }
