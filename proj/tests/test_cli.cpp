#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "lipnorm/json_io.hpp"

using lipnorm::Json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = lipnorm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write(const std::string& name, const std::string& text) {
  fs::create_directories(LIPNORM_TEST_TMP);
  const std::string path = std::string(LIPNORM_TEST_TMP) + "/" + name;
  std::ofstream(path) << text;
  return path;
}

const char* kSpace = R"({"points": ["0", "a", "b"], "base": "0", "dist": [[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]]})";

std::string map_json() {
  return std::string(R"({"domain": )") + kSpace +
         R"(, "codomain": {"dim": 2, "p": 2}, "values": {"a": [1, 0], "b": [0.5, 1]}})";
}

std::string tensor_json() {
  return std::string(R"({"space": )") + kSpace +
         R"(, "E": {"dim": 2, "p": 2}, "terms": [{"x": "a", "y": "b", "e": [3, 4]}]})";
}

}  // namespace

TEST(Cli, ValidateReportsViolations) {
  EXPECT_EQ(run({"validate", write("space.json", kSpace)}).code, lipnorm::cli::kOk);
  const Result bad = run({"validate", write("bad.json", R"({"points": ["0", "a", "b"], "dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]})")});
  EXPECT_EQ(bad.code, lipnorm::cli::kCheckFailed);
  const Json j = bad.json();
  EXPECT_FALSE(j.at("valid").get<bool>());
  EXPECT_EQ(j.at("violations")[0].at("kind"), "triangle");
}

TEST(Cli, AeNormOfAMoleculeIsExact) {
  const Result r = run({"aenorm", write("space.json", kSpace), write("mol.json", R"({"coeffs": {"a": 1, "b": -1}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json e = r.json().at("estimate");
  EXPECT_EQ(e.at("lower").get<double>(), 1.5);
  EXPECT_EQ(e.at("upper").get<double>(), 1.5);
  EXPECT_TRUE(e.at("exact").get<bool>());
  EXPECT_EQ(r.json().at("dual_value").get<double>(), 1.5);
}

TEST(Cli, PiNormOfTheIdentityContainsRootThree) {
  const Result r = run({"norm", "--kind", "pi", "--p", "2",
                        write("id.json", R"({"domain": {"dim": 3, "p": 2}, "codomain": {"dim": 3, "p": 2},
                                             "matrix": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json e = r.json().at("estimate");
  EXPECT_LE(e.at("lower").get<double>(), std::sqrt(3.0) + 1e-9);
  EXPECT_GE(e.at("upper").get<double>(), std::sqrt(3.0) - 1e-9);
}

TEST(Cli, EveryNormKindCertifies) {
  const std::string map = write("map.json", map_json());
  for (const char* kind : {"op", "pi", "dp", "pisl", "pil", "dpl"}) {
    const Result r = run({"--restarts", "8", "norm", "--kind", kind, map});
    ASSERT_EQ(r.code, 0) << kind << " " << r.err;
    const Result c = run({"certify", write(std::string("n_") + kind + ".json", r.out)});
    EXPECT_EQ(c.code, 0) << kind << " " << c.out;
    EXPECT_LT(c.json().at("max_residual").get<double>(), 1e-9);
  }
}

TEST(Cli, EveryCrossNormIsTheCrossNormOfASingleTerm) {
  const std::string t = write("tensor.json", tensor_json());
  for (const char* kind : {"piL", "epsL", "dpL", "gpL", "mu", "cs"}) {
    const Result r = run({"--restarts", "8", "crossnorm", "--kind", kind, t});
    ASSERT_EQ(r.code, 0) << kind << " " << r.err;
    const Json e = r.json().at("estimate");
    EXPECT_NEAR(e.at("lower").get<double>(), 7.5, 1e-6) << kind;
    EXPECT_NEAR(e.at("upper").get<double>(), 7.5, 1e-6) << kind;
    EXPECT_EQ(run({"certify", write(std::string("c_") + kind + ".json", r.out)}).code, 0) << kind;
  }
}

TEST(Cli, LipAndLinearize) {
  const std::string map = write("map.json", map_json());
  const Result lip = run({"lip", map});
  ASSERT_EQ(lip.code, 0);
  // |T(a) - T(b)| / 1.5 = sqrt(1.25) / 1.5 < |T(b)| / 2 = sqrt(1.25) / 2 < |T(a)| / 1 = 1.
  EXPECT_DOUBLE_EQ(lip.json().at("estimate").at("upper").get<double>(), 1.0);
  const Result lin = run({"linearize", map});
  ASSERT_EQ(lin.code, 0);
  EXPECT_EQ(lin.json().at("operator").at("matrix"), Json::parse("[[1, 0.5], [0, 1]]"));
}

TEST(Cli, OutputsEmbedVersionSeedAndConfig) {
  const Result r = run({"--seed", "42", "lip", write("map.json", map_json())});
  const Json j = r.json();
  EXPECT_EQ(j.at("tool"), "lipnorm");
  EXPECT_TRUE(j.contains("version"));
  EXPECT_EQ(j.at("config").at("seed"), "42");
  EXPECT_TRUE(j.at("config").contains("tolerances"));
  EXPECT_TRUE(j.at("config").contains("caps"));
}

TEST(Cli, SeedFromEnvironmentAndFlagPrecedence) {
  const std::string map = write("map.json", map_json());
  ::setenv("LIPNORM_SEED", "7", 1);
  EXPECT_EQ(run({"lip", map}).json().at("config").at("seed"), "7");
  EXPECT_EQ(run({"--seed", "9", "lip", map}).json().at("config").at("seed"), "9");
  ::setenv("LIPNORM_SEED", "seven", 1);
  EXPECT_EQ(run({"lip", map}).code, lipnorm::cli::kInputError);
  ::unsetenv("LIPNORM_SEED");
}

TEST(Cli, ByteIdenticalOutput) {
  const std::string map = write("map.json", map_json());
  const Result a = run({"--restarts", "8", "norm", "--kind", "pil", map});
  const Result b = run({"--restarts", "8", "--threads", "2", "norm", "--kind", "pil", map});
  // Thread count is echoed in the config; everything else must agree.
  Json ja = a.json(), jb = b.json();
  ja["config"].erase("threads");
  jb["config"].erase("threads");
  EXPECT_EQ(lipnorm::dump_deterministic(ja), lipnorm::dump_deterministic(jb));
  EXPECT_EQ(run({"--restarts", "8", "norm", "--kind", "pil", map}).out, a.out);
}

TEST(Cli, CheckSuiteExitCodeAndCsv) {
  const std::string csv = std::string(LIPNORM_TEST_TMP) + "/iso.csv";
  const Result r = run({"check", "--suite", "isometry", "--trials", "5", "--seed", "1", "--csv", csv});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.json().at("ok").get<bool>());
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("check,trial", 0), 0u);
  const Result text = run({"check", "--suite", "cor37", "--format", "text"});
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("cor37: 5 pass"), std::string::npos);
}

TEST(Cli, CertifyRejectsATamperedEstimate) {
  const Result r = run({"--restarts", "8", "norm", "--kind", "pi", write("map.json", map_json())});
  Json j = r.json();
  j["estimate"]["upper"] = j["estimate"]["upper"].get<double>() * 0.9;
  j["estimate"]["certificates"]["upper"]["value"] = j["estimate"]["upper"];
  const Result c = run({"certify", write("tampered.json", j.dump())});
  EXPECT_EQ(c.code, lipnorm::cli::kCheckFailed);
  EXPECT_FALSE(c.json().at("ok").get<bool>());
}

TEST(Cli, ErrorExitCodes) {
  const Result malformed = run({"lip", write("broken.json", "{\"x\":\n")});
  EXPECT_EQ(malformed.code, lipnorm::cli::kInputError);
  EXPECT_NE(malformed.err.find("line 2"), std::string::npos);  // location of the error
  EXPECT_EQ(run({"lip", "/nonexistent/map.json"}).code, lipnorm::cli::kInputError);
  EXPECT_EQ(run({"norm", "--kind", "nope", "x.json"}).code, lipnorm::cli::kInputError);
  EXPECT_EQ(run({}).code, lipnorm::cli::kInputError);
  EXPECT_EQ(run({"norm", "--kind", "pi", "--p", "two", write("map.json", map_json())}).code,
            lipnorm::cli::kInputError);
  // 11 points exceed the Lipschitz-ball enumeration cap.
  std::string pts = "[", dist = "[";
  for (int i = 0; i <= 10; ++i) {
    pts += (i ? ", \"" : "\"") + std::to_string(i) + "\"";
    dist += i ? ", [" : "[";
    for (int j = 0; j <= 10; ++j) dist += (j ? ", " : "") + std::to_string(std::abs(i - j));
    dist += "]";
  }
  pts += "]";
  dist += "]";
  const std::string big = R"({"space": {"points": )" + pts + R"(, "dist": )" + dist +
                          R"(}, "E": {"dim": 1, "p": 2}, "terms": [{"x": "1", "y": "0", "e": [1]}]})";
  EXPECT_EQ(run({"crossnorm", "--kind", "dpL", write("big.json", big)}).code, lipnorm::cli::kCapacityError);
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, 0);
  const Result v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, std::string(LIPNORM_VERSION) + "\n");
}
