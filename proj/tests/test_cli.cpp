#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridforge/basis.hpp"
#include "gridforge/cli.hpp"
#include "gridforge/qseries_io.hpp"

using namespace gridforge;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"gridforge"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, BasisTextLevelFive) {
  const CliRun r = run({"basis", "--level", "5", "--weight", "0", "--count", "3", "--prec", "20",
                     "--format", "text"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string l0, l1, l2;
  std::getline(lines, l0);
  std::getline(lines, l1);
  std::getline(lines, l2);
  EXPECT_EQ(l0, "1 + O(q^20)");
  EXPECT_EQ(l1.rfind("q^-1 + 9*q + 10*q^2 - 30*q^3", 0), 0u);
  EXPECT_EQ(l2.rfind("q^-2 + 20*q + 21*q^2", 0), 0u);
}

TEST(Cli, ClassifyExitCodes) {
  CliRun r = run({"classify", "--from", "5", "--to", "1", "--weight", "0", "--text"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "Preserved\n");
  r = run({"classify", "--from", "2", "--to", "1", "--weight", "-4", "--text"});
  EXPECT_EQ(r.code, 0);
  r = run({"classify", "--from", "5", "--to", "1", "--weight", "4", "--text"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "NotPreserved(g-side)\n");
  r = run({"classify", "--from", "6", "--to", "1", "--weight", "-6"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(nlohmann::json::parse(r.out)["preserved"].get<bool>());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"basis", "--level", "5"}).code, 2);
  EXPECT_EQ(run({"basis", "--level", "5", "--weight", "0", "--bogus"}).code, 2);
  EXPECT_EQ(run({"basis", "--level", "5", "--weight", "0", "--prec", "9"}).code, 2);
  EXPECT_EQ(run({"basis", "--level", "5", "--weight", "0", "--format", "xml"}).code, 2);
  const CliRun r = run({"nothing-here"});
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, DomainErrorsExitTwo) {
  EXPECT_EQ(run({"basis", "--level", "11", "--weight", "0"}).code, 2);
  EXPECT_EQ(run({"basis", "--level", "5", "--weight", "3"}).code, 2);
  EXPECT_EQ(run({"trace", "--from", "6", "--to", "4", "--weight", "0", "--index", "1"}).code, 2);
  // 40 elements at level 5 do not fit in 20 terms
  EXPECT_EQ(run({"basis", "--level", "5", "--weight", "0", "--count", "40", "--prec", "20"}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("genfun-check"), std::string::npos);
}

TEST(Cli, TraceOutputs) {
  CliRun r = run({"trace", "--from", "4", "--to", "1", "--weight", "0", "--space", "inf", "--index",
               "1", "--prec", "10", "--text"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("q^-1 + 196884*q + 21493760*q^2", 0), 0u);
  r = run({"trace", "--from", "2", "--to", "1", "--weight", "4", "--space", "inf", "--index", "0"});
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["applicable"].get<bool>());
  EXPECT_TRUE(j["expansion"].is_null());
}

TEST(Cli, GridDualityCheck) {
  const CliRun r = run({"grid", "--level", "5", "--weight", "0", "--count", "3", "--check-duality"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["residual"], "0");
}

TEST(Cli, SeedPrintedCheck) {
  CliRun r = run({"seed", "--level", "7", "--weight", "4", "--check-printed", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kind"], "synthesized");
  EXPECT_TRUE(j["printed_checks"][0]["match"].get<bool>());
  EXPECT_TRUE(j.contains("audit"));
  // level 13 differs from the printed line, which the registry flags
  r = run({"seed", "--level", "13", "--weight", "4", "--check-printed"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(r.out)["printed_checks"][0]["flagged_typo"].get<bool>());
}

TEST(Cli, ObstructionsAndGenfun) {
  CliRun r = run({"obstructions", "--from", "6", "--to", "1", "--weight", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["gside"].size(), 3u);
  r = run({"genfun-check", "--from", "2", "--to", "1", "--weight", "-6", "--window", "6"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  r = run({"genfun-check", "--level4", "--weight", "0", "--window", "4"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(run({"genfun-check", "--weight", "0"}).code, 2);
}

TEST(Cli, Registry) {
  const CliRun r = run({"registry"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["levels"].size(), 15u);
  bool level9 = false;
  for (const auto& l : j["levels"]) {
    if (l["N"] == 2) {
      for (const auto& e : l["vanishing"]) EXPECT_EQ(e["u"].get<int>(), e["v"].get<int>() - 1);
    }
    if (l["N"] == 9) {
      for (const auto& f : l["flags"]) level9 = level9 || f["code"] == "paper_typo";
    }
  }
  EXPECT_TRUE(level9);
}

TEST(Cli, Determinism) {
  for (auto args : {std::initializer_list<const char*>{"grid", "--level", "10", "--weight", "-2", "--count", "6"},
                    std::initializer_list<const char*>{"registry"},
                    std::initializer_list<const char*>{"seed", "--level", "25", "--weight", "2"}}) {
    const CliRun a = run(args);
    const CliRun b = run(args);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, JsonRoundTrip) {
  const CliRun r = run({"grid", "--level", "6", "--weight", "2", "--count", "4", "--prec", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto arr = nlohmann::json::parse(r.out);
  ASSERT_EQ(arr.size(), 8u);
  for (const auto& e : arr) {
    const auto s = parse_space(e["space"].get<std::string>());
    const CanonicalBasis b =
        build_basis(e["N"].get<std::int64_t>(), e["k"].get<std::int64_t>(), s, 4, 30);
    EXPECT_EQ(from_json(e["series"]), b.element(e["m"].get<std::int64_t>()));
  }
}

TEST(Cli, OutFileAndEnvPrecision) {
  const auto path = std::filesystem::temp_directory_path() / "gridforge_cli_test.txt";
  const std::string p = path.string();
  CliRun r = run({"basis", "--level", "2", "--weight", "0", "--count", "2", "--text", "--out", p.c_str()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::string first;
  std::getline(f, first);
  EXPECT_EQ(first, "1 + O(q^60)");
  std::filesystem::remove(path);

  setenv("GRIDFORGE_PREC", "12", 1);
  r = run({"basis", "--level", "2", "--weight", "0", "--count", "1", "--text"});
  EXPECT_EQ(r.out, "1 + O(q^12)\n");
  r = run({"basis", "--level", "2", "--weight", "0", "--count", "1", "--text", "--prec", "15"});
  EXPECT_EQ(r.out, "1 + O(q^15)\n");
  unsetenv("GRIDFORGE_PREC");
}

TEST(Cli, SelftestSingleCriterion) {
  CliRun r = run({"selftest", "--criterion", "1", "--text"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("criterion 1: PASS", 0), 0u);
  r = run({"selftest", "--criterion", "5"});
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["criteria"][0]["pass"].get<bool>());
  EXPECT_EQ(j["criteria"][0]["known_errata"].size(), 1u);
}
