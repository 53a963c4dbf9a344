/*
   Copyright 2026 The locdep Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "locdep/serialize.hpp"
#include "locdep_cli/commands.hpp"
#include "locdep_cli/spec.hpp"

namespace locdep::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;
};

class CliRun : public ::testing::Test {
protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("locdep_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  Result run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" LOCDEP_BINARY "' " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

  std::string read(const fs::path& p) const {
    std::ifstream in(dir_ / p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

const char* kMinimal = R"({
  // smallest useful document
  "family": "iid",
  "params": {"source": {"kind": "rademacher"}},
  "grid": [4, 8, 16],
  "statistic": "w1",
  "replications": 2000,
  "seed": 7,
  "checkers": {"suite": "field", "A": [1], "B": [2]},
  "assertions": {"ks_max": 0.3},
  "output": "out"
})";

TEST_F(CliRun, MinimalSpecWritesArtifacts) {
  write("iid.json", kMinimal);
  const auto r = run("run --spec iid.json --threads 2 -q");
  EXPECT_EQ(r.code, 0) << r.output;
  for (const char* name : {"moments.csv", "bounds.json", "summary.csv", "verdicts.csv", "rate_plot.dat",
                           "ratios.csv", "bounds_grid.csv", "run_manifest.json", "neighborhoods_n4.json"})
    EXPECT_TRUE(fs::exists(dir_ / "out" / name)) << name;
  const auto summary = read("out/summary.csv");
  const std::string hash = config_hash(kMinimal);
  EXPECT_NE(summary.find(hash + ",7,"), std::string::npos);
  EXPECT_NE(read("out/bounds.json").find(hash), std::string::npos);
}

TEST_F(CliRun, RerunIsByteIdentical) {
  write("iid.json", kMinimal);
  ASSERT_EQ(run("run --spec iid.json -q --threads 1").code, 0);
  std::vector<std::string> first;
  const std::vector<std::string> files{"moments.csv", "summary.csv", "verdicts.csv", "ratios.csv", "bounds_grid.csv",
                                       "bounds.json", "rate_plot.dat"};
  for (const auto& f : files) first.push_back(read("out/" + f));
  ASSERT_EQ(run("run --spec iid.json -q --threads 3").code, 0);
  for (std::size_t k = 0; k < files.size(); ++k) EXPECT_EQ(read("out/" + files[k]), first[k]) << files[k];
}

TEST_F(CliRun, ShrunkNeighborhoodFailsWithLdViolation) {
  write("shrunk.json", R"({
    "family": "m_dependent", "params": {"m": 1}, "grid": [4], "seed": 3, "replications": 1000,
    "checkers": {"suite": "field"},
    "neighborhoods": {"n": 4, "A": [[1], [2], [3], [4]]},
    "output": "out"
  })");
  const auto r = run("oracle --spec shrunk.json -q");
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_NE(r.output.find("ld1_dependence"), std::string::npos) << r.output;
}

TEST_F(CliRun, SchemaErrorsExitTwo) {
  write("bad.json", R"({"family": "lattice", "grid": [4], "seed": 1})");
  auto r = run("run --spec bad.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("/family"), std::string::npos) << r.output;
  write("broken.json", "{\n  \"family\": \"iid\",\n  \"grid\": [4,\n}");
  r = run("derive --spec broken.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("line"), std::string::npos) << r.output;
  EXPECT_EQ(run("run").code, 2);
  EXPECT_EQ(run("run --spec missing.json").code, 2);
}

TEST_F(CliRun, SeedAndOutputOverrides) {
  write("iid.json", kMinimal);
  ASSERT_EQ(run("mc --spec iid.json --seed 11 --out other -q").code, 0);
  EXPECT_NE(read("other/summary.csv").find(",11,"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliRun, CountSubcommand) {
  auto r = run("count word --sequence 0,1,0,1 --target 0,1 --gaps inf");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.output, "3\n");
  r = run("count pattern --sequence 1,3,2,4 --target 1,2 --gaps inf");
  EXPECT_EQ(r.output, "5\n");
  r = run("count subgraph --vertices 4 --edges 1-2,1-3,1-4,2-3,2-4,3-4 --pattern triangle");
  EXPECT_EQ(r.output, "24\n");
}

TEST(SpecParsing, ErrorLocations) {
  auto where = [](const std::string& text) {
    try {
      parse_spec(text);
    } catch (const SpecError& e) {
      return e.where();
    }
    return std::string("accepted");
  };
  EXPECT_EQ(where(R"({"family": "iid", "grid": [4], "seed": 1, "colour": 1})"), "/colour");
  EXPECT_EQ(where(R"({"family": "iid", "grid": [], "seed": 1})"), "/grid");
  EXPECT_EQ(where(R"({"family": "iid", "grid": [4]})"), "/seed");
  EXPECT_EQ(where(R"({"family": "iid", "grid": [4], "seed": 1, "replications": 10})"), "/replications");
  EXPECT_EQ(where(R"({"family": "iid", "grid": [4], "seed": 1, "statistic": "w3"})"), "/statistic");
  EXPECT_EQ(where(R"({"family": "iid", "grid": [4], "seed": 1, "params": {"source": {"kind": "cauchy"}}})"),
            "/params/source/kind");
  EXPECT_EQ(where(R"({"family": "iid", "grid": [4], "seed": 1, "bounds": ["decorated"]})"), "/bounds/0");
  EXPECT_EQ(where("{\n\"family\": \"iid\",\n\"grid\": [4]\n,,}").rfind("line 4", 0), 0u);
}

TEST(SpecParsing, DefaultsAndFamilies) {
  const auto s = parse_spec(R"({"family": "graph", "params": {"graph": "cycle"}, "grid": [6, 8], "seed": 2})");
  EXPECT_EQ(s.family.family, "graph");
  EXPECT_EQ(s.mode, Mode::MonteCarlo);
  EXPECT_EQ(s.bounds, default_bounds("graph"));
  EXPECT_EQ(s.ratio_bound, s.bounds.front());
  EXPECT_TRUE(bound_fits_family("main", "graph"));
  EXPECT_FALSE(bound_fits_family("decorated", "iid"));
  EXPECT_EQ(named_pattern_graph("square").edge_count(), 4u);
  EXPECT_EQ(named_pattern_graph("star3").vertex_count(), 4u);
  EXPECT_THROW(named_pattern_graph("pentagon"), SpecError);
  const auto d = parse_dist_text(R"({"kind": "bernoulli", "p": 0.25})");
  EXPECT_DOUBLE_EQ(mean(d), 0.25);
}

} // namespace
} // namespace locdep::cli
