#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "nuqs_cli/cli.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation nuqs(std::vector<std::string> args) {
  args.insert(args.begin(), "nuqs");
  std::ostringstream out, err;
  const int code = nuqs::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nuqs_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST(Eval, VacuumHasNoInformation) {
  const Invocation r = nuqs({"eval", "--T", "2", "--n-sat", "1", "--delta-bar", "0", "--R",
                      "0", "--theta", "0", "--r", "0", "--psi", "0", "--target", "od"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["fisher"]["value"], 0.0);
  EXPECT_EQ(j["v"], 1.0);
  for (const char* key : {"mu", "v", "phi", "xi", "gamma_bar", "fisher"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Eval, NegativeSqueezingIsUsageError) {
  const Invocation r = nuqs({"eval", "--r", "-1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("r must be ≥ 0"), std::string::npos) << r.err;
}

TEST(Eval, CoherentHasNoVarianceTerm) {
  const Invocation r = nuqs({"eval", "--T", "1", "--n-sat", "1", "--delta-bar", "1", "--R",
                      "1", "--theta", "0.25", "--r", "0", "--psi", "0", "--target",
                      "detuning"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["fisher"]["var_term"], 0.0);
  EXPECT_GT(j["fisher"]["value"].get<double>(), 0.0);
}

TEST(Eval, UsageErrors) {
  EXPECT_EQ(nuqs({"eval", "--T", "abc"}).code, 2);
  EXPECT_EQ(nuqs({"eval", "--bogus", "1"}).code, 2);
  EXPECT_EQ(nuqs({"eval", "--target", "frequency"}).code, 2);
  EXPECT_EQ(nuqs({"eval", "--T", "-1"}).code, 2);
  EXPECT_EQ(nuqs({}).code, 2);
  EXPECT_EQ(nuqs({"--help"}).code, 0);
}

TEST(Config, FileValuesAndFlagOverride) {
  const fs::path cfg = scratch("eval.json");
  write_file(cfg, R"({"T": 2, "n-sat": 1, "R": 1, "theta": 0.25, "target": "od"})");
  const Invocation a = nuqs({"eval", "--config", cfg.string()});
  const Invocation b = nuqs({"eval", "--T", "2", "--n-sat", "1", "--R", "1", "--theta",
                      "0.25", "--target", "od"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);

  const Invocation c = nuqs({"eval", "--config", cfg.string(), "--T", "3"});
  const Invocation d = nuqs({"eval", "--T", "3", "--n-sat", "1", "--R", "1", "--theta",
                      "0.25", "--target", "od"});
  EXPECT_EQ(c.out, d.out);
}

TEST(Config, UnknownKeysRejected) {
  const fs::path cfg = scratch("bad.json");
  write_file(cfg, R"({"T": 2, "colour": "blue"})");
  EXPECT_EQ(nuqs({"eval", "--config", cfg.string()}).code, 2);
  write_file(cfg, "{not json");
  EXPECT_EQ(nuqs({"eval", "--config", cfg.string()}).code, 2);
  EXPECT_EQ(nuqs({"eval", "--config", scratch("missing.json").string()}).code, 2);
}

TEST(Optimize, AdvantageAtLeastOne) {
  const Invocation r = nuqs({"optimize", "--T", "1", "--n-sat", "0.1", "--target",
                      "detuning", "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_GE(j["advantage"].get<double>(), 1.0 - 1e-6);
  EXPECT_FALSE(j["boundary_flag"].get<bool>());
  EXPECT_NE(r.err.find("A = "), std::string::npos);
}

TEST(Optimize, DefaultMediumReportsBoundary) {
  const Invocation r = nuqs({"optimize", "--T", "1", "--n-sat", "1", "--target", "detuning"});
  EXPECT_EQ(r.code, 3);
  const json j = json::parse(r.out);
  EXPECT_GE(j["advantage"].get<double>(), 1.0 - 1e-6);
}

TEST(Optimize, UnsaturableMediumExitsThree) {
  const fs::path out = scratch("opt.json");
  const Invocation r = nuqs({"optimize", "--T", "1", "--n-sat", "1e12", "--target",
                      "detuning", "--json-out", out.string()});
  EXPECT_EQ(r.code, 3);
  const json j = json::parse(read_file(out));
  EXPECT_TRUE(j["boundary_flag"].get<bool>());
}

TEST(Optimize, PlateauAdvantage) {
  const Invocation r = nuqs({"optimize", "--T", "100", "--n-sat", "1", "--target", "detuning"});
  const json j = json::parse(r.out);
  EXPECT_GE(j["advantage"].get<double>(), 1.5);
  EXPECT_LE(j["advantage"].get<double>(), 3.0);
}

TEST(Optimize, SingleFamily) {
  const Invocation r = nuqs({"optimize", "--T", "1", "--n-sat", "1", "--family", "coherent"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["family"], "coherent");
  EXPECT_NEAR(j["value"].get<double>(), 0.16111155224094556, 1e-4 * 0.1611);
  EXPECT_EQ(nuqs({"optimize", "--family", "cat"}).code, 2);
}

TEST(Sweep, TwoByTwoCsv) {
  const std::vector<std::string> args{"sweep", "--n-sat-min", "0.1", "--n-sat-max",
                                      "1", "--n-sat-points", "2", "--T-min", "0.5",
                                      "--T-max", "2", "--T-points", "2"};
  const Invocation a = nuqs(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(line_count(a.out), 5u);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')),
            "n_sat,T,target,I_coh,I_sq,advantage,R,theta,r,psi,delta_bar,nbar,"
            "regime,boundary_flag");
  EXPECT_NE(a.err.find("4 cells"), std::string::npos);
  EXPECT_EQ(nuqs(args).out, a.out);
}

TEST(Sweep, GridFileJsonOutput) {
  const fs::path grid = scratch("grid.json");
  write_file(grid, R"({"n_sat": {"min": 0.1, "max": 1, "points": 2},
                       "T": {"min": 0.5, "max": 2, "points": 2},
                       "target": "od"})");
  const fs::path out = scratch("table.json");
  const Invocation r = nuqs({"sweep", "--grid", grid.string(), "--format", "json", "--out",
                      out.string(), "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(read_file(out));
  EXPECT_EQ(j["cells"].size(), 4u);
  EXPECT_EQ(j["grid"]["target"], "od");
  EXPECT_TRUE(j["metadata"].contains("config_hash"));

  const Invocation flagged = nuqs({"sweep", "--grid", grid.string(), "--T-points", "3",
                            "--format", "json"});
  ASSERT_EQ(flagged.code, 0) << flagged.err;
  EXPECT_EQ(json::parse(flagged.out)["cells"].size(), 6u);
}

TEST(Sweep, Errors) {
  EXPECT_EQ(nuqs({"sweep", "--T-points", "1"}).code, 2);
  EXPECT_EQ(nuqs({"sweep", "--n-sat-min", "5", "--n-sat-max", "1"}).code, 2);
  EXPECT_EQ(nuqs({"sweep", "--format", "xml"}).code, 2);
  EXPECT_EQ(nuqs({"sweep", "--n-sat-points", "2", "--T-points", "2", "--out",
                  "/nonexistent-dir/x/t.csv"})
                .code,
            1);
}

TEST(Simulate, LocationHook) {
  const Invocation r = nuqs({"simulate", "--hook", "normal-location", "--samples", "100",
                      "--reps", "10000", "--seed", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["crb_ratio"].get<double>(), 1.0, 0.05);
  EXPECT_EQ(j["analytic_fisher"], 1.0);
}

TEST(Simulate, FixedSeedIsDeterministic) {
  const std::vector<std::string> args{"simulate", "--T", "1", "--n-sat", "1", "--R",
                                      "1", "--theta", "1.0", "--delta-bar", "0.5",
                                      "--target", "od", "--reps", "300", "--seed",
                                      "17"};
  std::vector<std::string> threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  const Invocation a = nuqs(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(nuqs(args).out, a.out);
  EXPECT_EQ(nuqs(threaded).out, a.out);
}

TEST(Simulate, CoherentOptimumMatchesAnalytic) {
  const Invocation r = nuqs({"simulate", "--T", "1", "--n-sat", "1", "--target", "detuning",
                      "--at-optimum", "coherent", "--samples", "100", "--reps",
                      "10000", "--seed", "12345"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const double z = (j["empirical_fisher"].get<double>() -
                    j["analytic_fisher"].get<double>()) /
                   j["empirical_fisher_se"].get<double>();
  EXPECT_LE(std::abs(z), 3.0);
}

TEST(Simulate, NarrowBracketIsRuntimeError) {
  const Invocation r = nuqs({"simulate", "--hook", "normal-location", "--reps", "500",
                      "--bracket", "-0.01", "0.01"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bracket"), std::string::npos);
}

}  // namespace
