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

#include <cmath>
#include <random>
#include <sstream>

#include "locdep/serialize.hpp"
#include "support/naive.hpp"

namespace locdep {
namespace {

using testing::table_from_norms;
using testing::thrown_code;

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

const ArtifactStamp kStamp{"00000000deadbeef", 7};

TEST(Csv, Rfc4180Escaping) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_escape("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv_row({"x", "y,z", ""}), "x,\"y,z\",\r\n");
}

TEST(Hash, Fnv1a) {
  EXPECT_EQ(config_hash(""), "cbf29ce484222325");
  EXPECT_EQ(config_hash("a"), "af63dc4c8601ec8c");
  EXPECT_NE(config_hash("{\"n\": 1}"), config_hash("{\"n\": 2}"));
}

TEST(FormatDouble, RoundTrips) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int k = 0; k < 2000; ++k) {
    const double v = std::ldexp(u(rng), static_cast<int>(rng() % 200) - 100);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(3.0), "3");
}

TEST(Artifacts, MomentsCsvLayout) {
  const auto t = table_from_norms({1.0, 0.25}, 2.0);
  const auto rows = lines(moments_csv(t, kStamp));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "config_hash,seed,index,l2,l3,l4,se2,se3,se4");
  EXPECT_EQ(rows[1], "00000000deadbeef,7,1,1,1,1,0,0,0");
  EXPECT_EQ(rows[2], "00000000deadbeef,7,2,0.25,0.25,0.25,0,0,0");
}

TEST(Artifacts, MomentsGridNeedsMatchingSizes) {
  const auto t = table_from_norms({1.0}, 1.0);
  const auto rows = lines(moments_grid_csv({4, 8}, {t, t}, kStamp));
  EXPECT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].rfind("config_hash,seed,n,mode,index", 0), 0u);
  EXPECT_EQ(thrown_code([&] { moments_grid_csv({4}, {t, t}, kStamp); }), ErrorCode::GridMismatch);
}

TEST(Artifacts, BoundGridHasTermAndTotalRows) {
  const auto r = bound_main(table_from_norms(std::vector<double>(4, 1.0), 4.0), 1, 1);
  const auto rows = lines(bound_grid_csv({r}, kStamp));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "config_hash,seed,n,theorem,term,value");
  EXPECT_NE(rows[3].find(",main,total,"), std::string::npos);
  const auto json = bounds_json({r}, kStamp);
  EXPECT_NE(json.find("\"C=1 shape\""), std::string::npos);
  EXPECT_NE(json.find("third_moment"), std::string::npos);
}

TEST(Artifacts, VerdictColumn) {
  const std::vector<InequalityVerdict> vs{
      make_verdict("a", 1, 2, 1, Precondition::Satisfied, "d"),
      make_verdict("b", 3, 2, 1, Precondition::Violated, "d"),
      make_verdict("c", 3, 2, 1, Precondition::NotApplicable, "d", "x=1, y=2"),
  };
  const auto rows = lines(verdicts_csv(vs, kStamp));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "config_hash,seed,instance,id,lhs,rhs,constant,margin,precondition,verdict,detail");
  EXPECT_NE(rows[1].find(",pass,"), std::string::npos);
  EXPECT_NE(rows[2].find(",vacuous,"), std::string::npos);
  EXPECT_NE(rows[3].find(",fail,\"x=1, y=2\""), std::string::npos);
}

TEST(Artifacts, SummaryRatioAndRatePlot) {
  EmpiricalSummary s;
  s.family = "iid";
  s.n = 64;
  s.replications = 1000;
  s.ks = 0.05;
  const auto rows = lines(summary_csv({s}, -0.5, kStamp));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "config_hash,seed,family,n,statistic,R,ks,ks_band,rejected,slope");
  EXPECT_NE(rows[1].find(",-0.5"), std::string::npos);
  EXPECT_EQ(lines(summary_csv({s}, std::nullopt, kStamp))[1].back(), ',');

  RatioTable t;
  t.rows.push_back({64, 0.05, 0.1, 0.5, 0.01});
  t.spread = 1.0;
  EXPECT_EQ(lines(ratio_csv(t, "main", kStamp))[0], "config_hash,seed,theorem,n,ks,shape,ratio,band,spread");

  RateFit fit;
  fit.points = {{64, 0.1}, {256, 0.05}};
  fit.slope = -0.5;
  const auto plot = lines(rate_plot_data(fit, kStamp));
  EXPECT_EQ(plot[0][0], '#');
  EXPECT_EQ(plot.size(), 2u + static_cast<std::size_t>(std::count_if(plot.begin(), plot.end(), [](const std::string& l) {
                                 return !l.empty() && l[0] == '#';
                               })));
}

} // namespace
} // namespace locdep
