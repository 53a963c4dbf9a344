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
#include <numeric>
#include <random>

#include "locdep/graph.hpp"
#include "locdep/statistics.hpp"
#include "support/naive.hpp"

namespace locdep {
namespace {

using testing::random_permutation;
using testing::random_system;
using testing::thrown_code;

constexpr auto kInf = std::nullopt;

NeighborhoodSystem diagonal(std::size_t n) {
  std::vector<IndexSet> a(n);
  for (Index i = 0; i < n; ++i) a[i] = {i};
  return NeighborhoodSystem::with_default_cover(a);
}

NeighborhoodSystem band(std::size_t n) {
  std::vector<IndexSet> a(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i == 0 ? 0 : i - 1; j <= i + 1 && j < n; ++j) a[i].push_back(j);
  return NeighborhoodSystem::with_default_cover(a);
}

TEST(Statistics, SmallIidExample) {
  const std::vector<double> x{1, -1, 2};
  const auto sys = diagonal(3);
  const auto v = evaluate_statistics(x, sys, std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(v.s, 2.0);
  EXPECT_NEAR(*v.w1, 2.0 / std::sqrt(3.0), 1e-15);
  // V^2 = sum X^2 - n Xbar^2 = 6 - 4/3
  EXPECT_NEAR(v.v, std::sqrt(14.0 / 3.0), 1e-14);
  EXPECT_NEAR(*v.w2, 2.0 / std::sqrt(14.0 / 3.0), 1e-14);
  EXPECT_NEAR(v.vbar, std::sqrt(6.0), 1e-14);
  EXPECT_NEAR(v.w2bar, 2.0 / std::sqrt(6.0), 1e-14);
}

TEST(Statistics, BandedExample) {
  const std::vector<double> x{1, 2, 3};
  const auto sys = band(3);
  EXPECT_EQ(neighborhood_sums(x, sys), (std::vector<double>{3, 6, 5}));
  // sum X Y = 30, n Xbar Ybar = 28
  const auto sn = self_normalized_w2(x, sys);
  EXPECT_NEAR(sn.v, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(*sn.w2, 6.0 / std::sqrt(2.0), 1e-13);
}

TEST(Statistics, ZeroVarianceEstimateIsRejected) {
  const std::vector<double> x{0, 0, 0, 0};
  EXPECT_FALSE(self_normalized_w2(x, band(4)).w2.has_value());
  const std::vector<double> c{1, 1, 1};
  EXPECT_FALSE(self_normalized_w2(c, diagonal(3)).w2.has_value());
}

TEST(Statistics, ClampBounds) {
  EXPECT_DOUBLE_EQ(psi_clamp(0.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(psi_clamp(-5.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(psi_clamp(3.0, 2.0), std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(psi_clamp(100.0, 2.0), std::sqrt(8.0));
  EXPECT_EQ(thrown_code([] { psi_clamp(1.0, 0.0); }), ErrorCode::DegenerateVariance);
  const std::vector<double> x{1.0};
  EXPECT_EQ(thrown_code([&] { sum_and_w1(x, 0.0); }), ErrorCode::DegenerateVariance);
  const auto v = evaluate_statistics(x, diagonal(1), 0.0);
  EXPECT_FALSE(v.w1.has_value());
}

TEST(Statistics, SelfNormalizedIsScaleInvariant) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng() % 30;
    const auto sys = random_system(rng, n, true);
    std::vector<double> x(n);
    for (double& v : x) v = nd(rng);
    const auto base = self_normalized_w2(x, sys);
    if (!base.w2) continue;
    const double c = std::exp(nd(rng) * 2.0);
    std::vector<double> y(x);
    for (double& v : y) v *= c;
    const auto scaled = self_normalized_w2(y, sys);
    ASSERT_TRUE(scaled.w2.has_value());
    EXPECT_NEAR(*scaled.w2, *base.w2, 1e-9 * (1.0 + std::abs(*base.w2)));
  }
}

TEST(Statistics, ClampedStatisticIsBounded) {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng() % 25;
    const auto sys = random_system(rng, n, true);
    std::vector<double> x(n);
    for (double& v : x) v = nd(rng) * 3.0;
    const double sigma = 0.1 + std::abs(nd(rng)) * 5.0;
    const auto c = clamped_w2bar(x, sys, sigma);
    const double s = std::accumulate(x.begin(), x.end(), 0.0);
    EXPECT_LE(std::abs(c.w2bar), 2.0 * std::abs(s) / sigma * (1.0 + 1e-12));
    EXPECT_GE(c.vbar, sigma / 2.0 * (1.0 - 1e-12));
    EXPECT_LE(c.vbar, std::sqrt(2.0) * sigma * (1.0 + 1e-12));
  }
}

TEST(Statistics, RelabelingLeavesStatisticsUnchanged) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng() % 20;
    const auto sys = random_system(rng, n, true);
    std::vector<double> x(n);
    for (double& v : x) v = nd(rng);
    const auto perm = random_permutation(rng, n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[perm[i]] = x[i];
    const auto a = evaluate_statistics(x, sys, 1.3);
    const auto b = evaluate_statistics(y, relabel(sys, perm), 1.3);
    EXPECT_NEAR(a.s, b.s, 1e-12);
    EXPECT_NEAR(a.v, b.v, 1e-10);
    EXPECT_NEAR(a.w2bar, b.w2bar, 1e-10);
  }
}

TEST(Statistics, PairwiseSumIsAccurate) {
  std::vector<double> x(1000001, 0.1);
  x[0] = 1e8;
  const double exact = 1e8 + 0.1 * 1000000;
  EXPECT_NEAR(pairwise_sum(x), exact, 1e-5);
  EXPECT_EQ(to_string(parse_statistic("w2bar")), "w2bar");
  EXPECT_EQ(thrown_code([] { parse_statistic("w3"); }), ErrorCode::InvalidArgument);
}

std::uint64_t brute_count(std::span<const int> s, std::span<const int> w, const GapConstraint& gaps, bool exact,
                          bool pattern) {
  const std::size_t n = s.size(), l = w.size();
  std::uint64_t count = 0;
  std::vector<std::size_t> idx(l);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == l) {
      for (std::size_t a = 0; a < l; ++a) {
        if (!pattern && s[idx[a]] != w[a]) return;
        for (std::size_t b = a + 1; pattern && b < l; ++b)
          if ((s[idx[a]] < s[idx[b]]) != (w[a] < w[b])) return;
      }
      ++count;
      return;
    }
    for (std::size_t t = j == 0 ? 0 : idx[j - 1] + 1; t < n; ++t) {
      if (j > 0 && gaps[j - 1]) {
        const std::size_t d = t - idx[j - 1];
        if (d > *gaps[j - 1] || (exact && d != *gaps[j - 1])) continue;
      }
      idx[j] = t;
      rec(j + 1);
    }
  };
  rec(0);
  return count;
}

TEST(Counters, WordExamples) {
  const std::vector<int> s{0, 1, 0, 1}, w{0, 1};
  EXPECT_EQ(count_word_occurrences(s, w, {kInf}), 3u);
  EXPECT_EQ(count_word_occurrences(s, w, {1}), 2u);
  EXPECT_EQ(count_word_occurrences(s, w, {3}, true), 1u);
  EXPECT_EQ(count_word_occurrences(s, std::vector<int>{1, 0, 1}, {kInf, kInf}), 1u);
}

TEST(Counters, PatternExamples) {
  const std::vector<int> pi{1, 3, 2, 4};
  EXPECT_EQ(count_pattern_occurrences(pi, std::vector<int>{0, 1}, {kInf}), 5u);
  EXPECT_EQ(count_pattern_occurrences(pi, std::vector<int>{1, 0}, {kInf}), 1u);
  EXPECT_EQ(count_pattern_occurrences(pi, std::vector<int>{0, 2, 1}, {kInf, kInf}), 1u);
}

TEST(Counters, AgreeWithBruteForce) {
  std::mt19937_64 rng(24);
  const std::vector<GapConstraint> gap_sets{{kInf, kInf}, {1, kInf}, {2, 3}, {kInf, 2}};
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 3 + rng() % 12;
    std::vector<int> s(n), perm(n);
    for (int& c : s) c = static_cast<int>(rng() % 3);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::vector<int> w{static_cast<int>(rng() % 3), static_cast<int>(rng() % 3), static_cast<int>(rng() % 3)};
    std::vector<int> tau{0, 1, 2};
    std::shuffle(tau.begin(), tau.end(), rng);
    for (const auto& g : gap_sets)
      for (bool exact : {false, true}) {
        EXPECT_EQ(count_word_occurrences(s, w, g, exact), brute_count(s, w, g, exact, false));
        EXPECT_EQ(count_pattern_occurrences(perm, tau, g, exact), brute_count(perm, tau, g, exact, true));
      }
  }
}

TEST(Counters, SubgraphCopies) {
  const auto k4 = complete_graph(4);
  const auto tri = subgraph_statistic(k4, complete_graph(3));
  EXPECT_EQ(tri.injective_homomorphisms, 24u);
  EXPECT_EQ(tri.automorphisms, 6u);
  EXPECT_EQ(tri.copies, 4u);
  const auto paths = subgraph_statistic(k4, path_graph(3));
  EXPECT_EQ(paths.automorphisms, 2u);
  EXPECT_EQ(paths.copies, 12u);
  EXPECT_EQ(subgraph_statistic(cycle_graph(5), complete_graph(3)).copies, 0u);
  EXPECT_EQ(subgraph_statistic(cycle_graph(5), path_graph(3)).copies, 5u);
  EXPECT_EQ(thrown_code([&] { subgraph_statistic(complete_graph(40), complete_graph(4), 1000); }),
            ErrorCode::GraphTooLarge);
}

} // namespace
} // namespace locdep
