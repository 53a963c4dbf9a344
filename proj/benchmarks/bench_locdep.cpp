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


#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "locdep/bounds.hpp"
#include "locdep/enumeration.hpp"
#include "locdep/families.hpp"
#include "locdep/graph.hpp"
#include "locdep/harness.hpp"
#include "locdep/moments.hpp"
#include "locdep/oracle.hpp"
#include "locdep/rng.hpp"
#include "locdep/statistics.hpp"

namespace {

using namespace locdep;

void BM_PhiloxUniforms(benchmark::State& state) {
  const ReplicationStream stream(7, 3);
  std::uint64_t slot = 0;
  double acc = 0.0;
  for (auto _ : state) {
    const auto u = stream.uniforms(slot++);
    acc += u[0] + u[1];
  }
  benchmark::DoNotOptimize(acc);
  state.SetItemsProcessed(state.iterations() * 2);
}
BENCHMARK(BM_PhiloxUniforms);

void BM_McIidW1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto field = build_iid(n, rademacher());
  McOptions opts;
  opts.replications = 1000;
  opts.sigma = std::sqrt(static_cast<double>(n));
  for (auto _ : state) benchmark::DoNotOptimize(mc_run(field, nullptr, Statistic::W1, opts).ks);
  state.SetItemsProcessed(state.iterations() * 1000 * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_McIidW1)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_McMDependentW2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto field = build_m_dependent(n, 1, rademacher());
  const auto sys = induced_neighborhoods(field);
  McOptions opts;
  opts.replications = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(mc_run(field, &sys, Statistic::W2, opts).ks);
}
BENCHMARK(BM_McMDependentW2)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_SelfNormalized(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto field = build_m_dependent(n, 2, standard_normal());
  const auto sys = induced_neighborhoods(field);
  const auto x = field.sample(1, 0).values;
  for (auto _ : state) benchmark::DoNotOptimize(self_normalized_w2(x, sys).v);
}
BENCHMARK(BM_SelfNormalized)->Arg(1024)->Arg(16384);

void BM_ExactLaw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto field = build_m_dependent(n, 1, rademacher());
  for (auto _ : state) benchmark::DoNotOptimize(exact_law(field).outcomes());
}
BENCHMARK(BM_ExactLaw)->Arg(8)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_ExactKolmogorov(benchmark::State& state) {
  const auto field = build_m_dependent(static_cast<std::size_t>(state.range(0)), 1, rademacher());
  const auto sys = induced_neighborhoods(field);
  for (auto _ : state) benchmark::DoNotOptimize(exact_kolmogorov(field, sys, Statistic::W2).distance);
}
BENCHMARK(BM_ExactKolmogorov)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_GeneralBeta(benchmark::State& state) {
  const auto field = build_m_dependent(static_cast<std::size_t>(state.range(0)), 2, rademacher());
  const auto sys = NeighborhoodSystem::with_default_cover(induced_neighborhoods(field).neighborhoods());
  const auto derived = derive(sys);
  const auto table = local_moment_table(field, sys);
  for (auto _ : state) benchmark::DoNotOptimize(bound_general_beta(table, sys, derived).value);
}
BENCHMARK(BM_GeneralBeta)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_TriangleCount(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.3);
  std::vector<double> edges(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (double& e : edges) e = coin(rng) ? 1.0 : 0.0;
  const auto host = graph_from_edge_indicators(n, edges);
  const auto k3 = complete_graph(3);
  for (auto _ : state) benchmark::DoNotOptimize(injective_homomorphism_count(k3, host));
}
BENCHMARK(BM_TriangleCount)->Arg(40)->Arg(160);

void BM_WordCounter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(6);
  std::vector<int> s(n);
  for (int& c : s) c = static_cast<int>(rng() % 4);
  const std::vector<int> w{0, 1, 2};
  const GapConstraint gaps{std::nullopt, 3};
  for (auto _ : state) benchmark::DoNotOptimize(count_word_occurrences(s, w, gaps));
}
BENCHMARK(BM_WordCounter)->Arg(1000)->Arg(4000);

void BM_PatternCounter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(8);
  std::vector<int> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = static_cast<int>(i);
  std::shuffle(pi.begin(), pi.end(), rng);
  const std::vector<int> tau{1, 0, 2};
  const GapConstraint gaps{std::nullopt, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(count_pattern_occurrences(pi, tau, gaps));
}
BENCHMARK(BM_PatternCounter)->Arg(100)->Arg(400);

void BM_TwoPointR4(benchmark::State& state) {
  const auto fns = standard_test_functions();
  for (auto _ : state)
    benchmark::DoNotOptimize(check_smooth_functional_iid(TwoPointLaw{}, static_cast<std::size_t>(state.range(0)), fns));
}
BENCHMARK(BM_TwoPointR4)->Arg(100000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
