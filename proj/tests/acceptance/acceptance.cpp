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


// Acceptance suite. One PASS/FAIL line per criterion; exit status 0 iff all
// pass. Criterion numbers may be given on the command line to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "locdep/bounds.hpp"
#include "locdep/enumeration.hpp"
#include "locdep/families.hpp"
#include "locdep/field.hpp"
#include "locdep/graph.hpp"
#include "locdep/harness.hpp"
#include "locdep/moments.hpp"
#include "locdep/oracle.hpp"
#include "locdep/statistics.hpp"
#include "support/naive.hpp"

namespace {

using namespace locdep;
using namespace locdep::testing;

constexpr std::uint64_t kSuiteSeed = 20260101;
constexpr std::size_t kSuiteInstances = 200;
constexpr double kSlopeLo = -0.75, kSlopeHi = -0.35;

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned threads() { return resolve_threads(0); }

// Instances shared by criteria 1-3.
struct SuiteCase {
  RandomInstance ri;
  std::unique_ptr<ExactInstance> inst;
};

std::vector<SuiteCase>& suite() {
  static std::vector<SuiteCase> cases = [] {
    std::vector<SuiteCase> out(kSuiteInstances);
    parallel_chunks(kSuiteInstances, threads(), [&](std::size_t k) {
      out[k].ri = make_random_instance(kSuiteSeed, k, 10);
      out[k].inst = std::make_unique<ExactInstance>(make_instance(*out[k].ri.field, out[k].ri.sys));
    });
    return out;
  }();
  return cases;
}

double normalized_margin(const InequalityVerdict& v) { return v.margin / std::max(1.0, std::abs(v.rhs)); }

Outcome explicit_constant_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  auto& cases = suite();
  std::vector<std::vector<InequalityVerdict>> per(cases.size());
  parallel_chunks(cases.size(), threads(), [&](std::size_t k) {
    const auto& c = cases[k];
    auto& out = per[k];
    out.push_back(check_quadratic_form(*c.inst, c.ri.a, c.ri.xi, c.ri.p));
    out.push_back(check_quadratic_form_total(*c.inst));
    out.push_back(check_second_moment(*c.inst, c.ri.a, c.ri.xi, c.ri.p));
    out.push_back(check_concentration(*c.inst, c.ri.a, c.ri.b_set, c.ri.lo, c.ri.hi, c.ri.c, c.ri.xi));
    out.push_back(check_self_normalized_concentration(*c.inst, c.ri.a, c.ri.b_set, c.ri.lo, c.ri.hi, c.ri.c, c.ri.xi));
  });
  std::size_t checks = 0, failures = 0, vacuous = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::string first_failure;
  for (std::size_t k = 0; k < per.size(); ++k)
    for (const auto& v : per[k]) {
      ++checks;
      if (v.vacuous()) ++vacuous;
      if (v.failed()) {
        if (failures++ == 0) first_failure = fmt::format(" first failure {} on instance {}", v.id, k);
      }
      worst = std::min(worst, normalized_margin(v));
    }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {failures == 0 && secs <= 300.0,
          fmt::format("{} instances, {} checks, {} failures, {} vacuous, min margin/max(1,rhs) {:.3e}, {:.1f}s on {} "
                      "threads{}",
                      cases.size(), checks, failures, vacuous, worst, secs, threads(), first_failure)};
}

Outcome fourth_moment_suite() {
  auto& cases = suite();
  std::vector<std::vector<InequalityVerdict>> per(cases.size());
  parallel_chunks(cases.size(), threads(), [&](std::size_t k) {
    const auto& c = cases[k];
    per[k] = check_fourth_moment(*c.inst, c.ri.a, c.ri.xi, c.ri.p);
  });
  std::size_t satisfied = 0, failures = 0;
  for (const auto& vs : per) {
    if (vs[1].precondition == Precondition::Satisfied) ++satisfied;
    for (const auto& v : vs) failures += v.failed() ? 1 : 0;
  }

  const std::size_t n = 250000;
  auto field = build_iid(n, rademacher());
  const auto table = table_from_norms(std::vector<double>(n, 1.0), static_cast<double>(n));
  const auto pre = fourth_moment_precondition(table, 1, 1, 1);
  McOptions opts;
  opts.replications = 2000;
  opts.seed = kSuiteSeed + 2;
  opts.sigma = std::sqrt(static_cast<double>(n));
  opts.threads = threads();
  const auto mc = mc_run(field, nullptr, Statistic::W1, opts);
  const bool mc_ok = std::abs(mc.m4 - 3.0) <= 3.0 * mc.m4_se && mc.m4 <= 13.0;

  const auto big = check_fourth_moment_iid(TwoPointLaw{}, 1'000'000);
  return {failures == 0 && mc_ok && big.pass(),
          fmt::format("suite: {} failures, {} with precondition satisfied; n={} MC m4 {:.4f} (SE {:.4f}, |m4-3|/SE "
                      "{:.2f}), precondition {} (first part n^-1/2 = 1/500 holds, second part 2 n^-1/2 exceeds "
                      "1/500); n=1e6 exact E S^4/sigma^4 {:.6f} <= {:.1f}, precondition {}",
                      failures, satisfied, n, mc.m4, mc.m4_se, std::abs(mc.m4 - 3.0) / mc.m4_se, to_string(pre),
                      big.lhs / std::pow(1e6, 2), big.rhs / std::pow(1e6, 2), to_string(big.precondition))};
}

Outcome necessary_condition_suite() {
  auto& cases = suite();
  const auto fns = standard_test_functions();
  std::vector<std::vector<InequalityVerdict>> per(cases.size());
  parallel_chunks(cases.size(), threads(), [&](std::size_t k) { per[k] = check_smooth_functional(*cases[k].inst, fns); });
  std::size_t satisfied = 0, failures = 0, total = 0;
  for (const auto& vs : per)
    for (const auto& v : vs) {
      ++total;
      satisfied += v.precondition == Precondition::Satisfied ? 1 : 0;
      failures += v.failed() ? 1 : 0;
    }

  // Exact binomial reduction where the precondition holds.
  struct Case {
    TwoPointLaw law;
    std::size_t n;
  };
  const std::vector<Case> iid{{{-1.0, 1.0, 0.5}, 250000},
                              {{-1.0, 1.0, 0.5}, 1'000'000},
                              {{-0.3, 0.7, 0.3}, 1'000'000},
                              {{-0.6, 0.4, 0.6}, 1'000'000}};
  std::size_t iid_checks = 0, iid_satisfied = 0, iid_failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : iid)
    for (const auto& v : check_smooth_functional_iid(c.law, c.n, fns)) {
      ++iid_checks;
      iid_satisfied += v.precondition == Precondition::Satisfied ? 1 : 0;
      iid_failures += v.failed() ? 1 : 0;
      worst = std::min(worst, v.margin / std::max(1.0, std::abs(v.rhs)));
    }
  return {failures == 0 && iid_failures == 0 && iid_satisfied == iid_checks,
          fmt::format("suite: {} checks, {} with precondition satisfied, {} failures; large-n i.i.d.: {} checks, {} "
                      "satisfied, {} failures, min normalized margin {:.3e}",
                      total, satisfied, failures, iid_checks, iid_satisfied, iid_failures, worst)};
}

Outcome exact_vs_mc() {
  const std::uint64_t reps = 100000;
  const double tol = 2.0 / std::sqrt(static_cast<double>(reps));
  std::size_t good = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto ri = make_random_instance(kSuiteSeed + 4, s, 10);
    const auto exact = exact_kolmogorov(*ri.field, ri.sys, Statistic::W1);
    McOptions opts;
    opts.replications = reps;
    opts.seed = 1000 + s;
    opts.sigma = exact.sigma;
    opts.threads = threads();
    const auto mc = mc_run(*ri.field, nullptr, Statistic::W1, opts);
    const double gap = std::abs(mc.ks - exact.distance);
    worst = std::max(worst, gap);
    good += gap <= tol ? 1 : 0;
  }
  return {good >= 19, fmt::format("{}/20 seeds within 2/sqrt(R) = {:.5f}, max gap {:.5f}", good, tol, worst)};
}

std::string grid_text(const RateFit& fit) {
  std::string s;
  for (const auto& p : fit.points) s += fmt::format("{}{:g}:{:.5f}", s.empty() ? "" : " ", p.n, p.ks);
  return s;
}

struct GridRun {
  std::vector<EmpiricalSummary> summaries;
  std::vector<BoundReport> shapes;
  RateFit fit;
};

GridRun run_grid(const std::vector<std::size_t>& grid, const std::function<LatentSourceField(std::size_t)>& make,
                 Statistic stat, bool self_normalized_shape, std::uint64_t reps, std::uint64_t seed) {
  GridRun g;
  std::vector<RatePoint> pts;
  for (std::size_t n : grid) {
    const auto field = make(n);
    const auto sys = induced_neighborhoods(field);
    const auto d = derive(sys);
    const auto table = local_moment_table(field, sys);
    McOptions opts;
    opts.replications = reps;
    opts.seed = seed;
    opts.sigma = table.sigma();
    opts.threads = threads();
    g.summaries.push_back(mc_run(field, &sys, stat, opts));
    g.shapes.push_back(self_normalized_shape ? bound_self_normalized(table, d.kappa, d.tau)
                                             : bound_main(table, d.kappa, d.tau));
    pts.push_back({static_cast<double>(n), g.summaries.back().ks});
  }
  g.fit = rate_fit(pts);
  return g;
}

Outcome iid_rate() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = run_grid({64, 256, 1024, 4096}, [](std::size_t n) { return build_iid(n, rademacher()); },
                          Statistic::W1, false, 100000, kSuiteSeed + 5);
  const auto ratios = ratio_table(g.summaries, g.shapes);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = g.fit.slope >= kSlopeLo && g.fit.slope <= kSlopeHi && ratios.spread < 3.0 && secs <= 600.0;
  return {ok, fmt::format("ks {}; slope {:.3f}; ks/shape spread {:.3f}; {:.1f}s", grid_text(g.fit), g.fit.slope,
                          ratios.spread, secs)};
}

Outcome self_normalized_regime() {
  const auto field = build_iid(200, standard_normal());
  const auto sys = induced_neighborhoods(field);
  McOptions opts;
  opts.replications = 50000;
  opts.seed = kSuiteSeed + 6;
  opts.sigma = std::sqrt(200.0);
  opts.threads = threads();
  const auto mc = mc_run(field, &sys, Statistic::W2, opts);
  return {mc.ks <= 0.05 && mc.rejected == 0,
          fmt::format("ks(W2) {:.5f} (band {:.5f}), rejected {}", mc.ks, mc.ks_band, mc.rejected)};
}

Outcome m_dependent_regime() {
  const std::vector<std::size_t> grid{64, 256, 1024, 4096};
  auto make = [](std::size_t n) { return build_m_dependent(n, 1, rademacher()); };
  const auto w1 = run_grid(grid, make, Statistic::W1, false, 100000, kSuiteSeed + 7);
  const auto w2 = run_grid(grid, make, Statistic::W2, true, 100000, kSuiteSeed + 7);
  const auto ratios = ratio_table(w2.summaries, w2.shapes);
  bool finite = true;
  for (const auto& r : ratios.rows) finite = finite && std::isfinite(r.ratio) && r.ratio > 0.0;
  const bool ok = w1.fit.slope >= kSlopeLo && w1.fit.slope <= kSlopeHi && finite && ratios.spread < 5.0;
  return {ok, fmt::format("W1 ks {}; slope {:.3f}; W2 ks {}; W2 ks/shape spread {:.3f}", grid_text(w1.fit),
                          w1.fit.slope, grid_text(w2.fit), ratios.spread)};
}

Outcome graph_regime() {
  const double p = 0.3;
  const auto triangle = complete_graph(3);
  std::vector<EmpiricalSummary> summaries;
  std::vector<BoundReport> shapes;
  std::vector<RatePoint> pts;
  for (std::uint32_t n : {20u, 40u, 80u}) {
    const auto field = build_subgraph_count_field(n, triangle, p);
    const double sigma = 6.0 * std::sqrt(triangle_count_variance(n, p));
    McOptions opts;
    opts.replications = 20000;
    opts.seed = kSuiteSeed + 8;
    opts.sigma = sigma;
    opts.threads = threads();
    summaries.push_back(mc_run(field, nullptr, Statistic::W1, opts));
    auto table = symmetric_moment_table(field, 0);
    set_analytic_variance(table, sigma * sigma, "36 Var(triangles)");
    shapes.push_back(bound_decorated(table, n, 3));
    pts.push_back({static_cast<double>(n), summaries.back().ks});
  }
  const auto fit = rate_fit(pts);
  const auto ratios = ratio_table(summaries, shapes);
  bool decreasing = true;
  for (std::size_t g = 1; g < pts.size(); ++g) decreasing = decreasing && pts[g].ks < pts[g - 1].ks;
  return {decreasing && ratios.spread < 5.0,
          fmt::format("ks {}; strictly decreasing {}; slope {:.3f}; ks/shape spread {:.3f}", grid_text(fit),
                      decreasing ? "yes" : "no", fit.slope, ratios.spread)};
}

double raw_total(const LatentSourceField& f, std::span<const double> sources) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.raw_value(static_cast<Index>(i), sources);
  return s;
}

GapConstraint random_gaps(std::mt19937_64& rng, std::size_t l, std::size_t max_gap) {
  GapConstraint g(l - 1);
  for (auto& d : g)
    if (rng() % 3 != 0) d = 1 + rng() % max_gap;
  return g;
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(kSuiteSeed + 9);
  std::size_t words = 0, perms = 0, graphs = 0, mismatches = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t letters = 2 + rng() % 3;
    const std::size_t l = 1 + rng() % 3;
    std::vector<int> w(l);
    for (int& c : w) c = static_cast<int>(rng() % letters);
    // at most one infinite gap keeps the tuple count near n^2
    GapConstraint gaps = random_gaps(rng, l, 6);
    if (l == 3 && !gaps[0] && !gaps[1]) gaps[1] = 1 + rng() % 6;
    const bool exact = rng() % 2 == 0;
    std::size_t span = 1;
    for (const auto& d : gaps) span += d ? *d : 1;
    const std::size_t n = span + rng() % (501 - span);
    const auto f = build_word_field(n, std::vector<double>(letters, 1.0 / static_cast<double>(letters)), w, gaps, exact);
    std::vector<int> s(n);
    std::vector<double> src(n);
    for (std::size_t t = 0; t < n; ++t) {
      s[t] = static_cast<int>(rng() % letters);
      src[t] = s[t];
    }
    ++words;
    if (raw_total(f, src) != static_cast<double>(count_word_occurrences(s, w, gaps, exact))) ++mismatches;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t l = 1 + rng() % 3;
    std::vector<int> tau(l);
    std::iota(tau.begin(), tau.end(), 0);
    std::shuffle(tau.begin(), tau.end(), rng);
    const auto gaps = random_gaps(rng, l, 4);
    const bool exact = rng() % 2 == 0;
    std::size_t span = 1;
    for (const auto& d : gaps) span += d ? *d : 1;
    const std::size_t n = span + rng() % (11 - span);
    const auto f = build_pattern_field(n, tau, gaps, exact);
    std::vector<double> src(n);
    for (double& x : src) x = unif(rng);
    std::vector<int> order(n), pi(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return src[a] < src[b]; });
    for (std::size_t r = 0; r < n; ++r) pi[order[r]] = static_cast<int>(r);
    ++perms;
    if (raw_total(f, src) != static_cast<double>(count_pattern_occurrences(pi, tau, gaps, exact))) ++mismatches;
  }
  const std::vector<SimpleGraph> patterns{path_graph(2), path_graph(3), complete_graph(3), cycle_graph(4),
                                          star_graph(3), path_graph(4)};
  for (int rep = 0; rep < 50; ++rep) {
    const auto& pattern = patterns[rng() % patterns.size()];
    const auto n = static_cast<std::uint32_t>(pattern.vertex_count() + rng() % (9 - pattern.vertex_count()));
    DecoratedSpec spec;
    spec.n = n;
    spec.pattern = pattern;
    spec.decoration.assign(pattern.edge_count(), 1.0);
    spec.h = [](double f, double g) { return f * g; };
    spec.edge_dist = bernoulli(0.5);
    const auto field = build_decorated_graph_field(spec);
    std::vector<double> src(n * (n - 1) / 2);
    const double density = unif(rng);
    for (double& x : src) x = unif(rng) < density ? 1.0 : 0.0;
    const auto host = graph_from_edge_indicators(n, src);
    ++graphs;
    if (raw_total(field, src) != static_cast<double>(injective_homomorphism_count(pattern, host))) ++mismatches;
  }
  return {mismatches == 0 && words == 100 && perms == 100 && graphs == 50,
          fmt::format("{} strings, {} permutations, {} graphs, {} mismatches", words, perms, graphs, mismatches)};
}

Outcome distributed_identities() {
  std::mt19937_64 rng(kSuiteSeed + 10);
  std::normal_distribution<double> normal(0.5, 1.5);
  const std::vector<std::pair<unsigned, Kernel>> kernels{
      {2, [](std::span<const double> v) { return v[0] * v[1]; }},
      {2, [](std::span<const double> v) { return (v[0] - v[1]) * (v[0] - v[1]) / 2.0; }},
      {2, [](std::span<const double> v) { return std::abs(v[0] - v[1]); }},
      {3, [](std::span<const double> v) { return v[0] * v[1] * v[2]; }},
      {3, [](std::span<const double> v) { return std::max({v[0], v[1], v[2]}); }},
  };
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto& [m, h] = kernels[rng() % kernels.size()];
    const std::size_t n = m + 1 + rng() % 40;
    std::vector<double> data(n);
    for (double& x : data) x = normal(rng);
    const std::vector<std::size_t> one{n};
    const double classical = classical_ustat(data, m, h);
    const double distributed = distributed_ustat(data, one, m, h);
    const auto field = build_ustat_field(one, m, h, standard_normal(), 0.0);
    worst = std::max({worst, rel_diff(classical, distributed), rel_diff(classical, raw_total(field, data))});
  }

  // W = sqrt(N) (U_d - theta) / (m sigma_1) with h = xy on N(1, 1) data:
  // theta = 1, sigma_1 = 1.
  const std::vector<std::size_t> blocks{20, 20, 20};
  const double big_n = 60.0;
  const auto field = build_ustat_field(blocks, 2, [](std::span<const double> v) { return v[0] * v[1]; },
                                       NormalDist{1.0, 1.0}, 1.0);
  McOptions opts;
  opts.replications = 100000;
  opts.seed = kSuiteSeed + 11;
  opts.sigma = 2.0 / std::sqrt(big_n);
  opts.threads = threads();
  const auto mc = mc_run(field, nullptr, Statistic::W1, opts);
  const double var_w = mc.variance;

  // |A_{i,j}| = |N_{i,j}| <= m C(n_i - 1, m - 1) per block; pair covers give
  // kappa_i <= 2 m C(n_i - 1, m - 1).
  std::size_t blocks_checked = 0, violations = 0;
  std::string sizes;
  for (std::size_t ni : {5u, 7u, 9u, 12u})
    for (unsigned m : {2u, 3u}) {
      const auto f = build_ustat_field({ni}, m, [](std::span<const double> v) { return v[0]; }, rademacher(), 0.0);
      const auto sys = induced_neighborhoods(f);
      const auto d = derive(sys);
      std::size_t max_a = 0, max_n = 0;
      for (const auto& a : sys.neighborhoods()) max_a = std::max(max_a, a.size());
      for (const auto& r : d.reverse) max_n = std::max(max_n, r.size());
      const double bound = static_cast<double>(m) * std::tgamma(static_cast<double>(ni)) /
                           (std::tgamma(static_cast<double>(m)) * std::tgamma(static_cast<double>(ni - m + 1)));
      const auto b = static_cast<std::size_t>(std::llround(bound));
      ++blocks_checked;
      if (max_a > b || max_n > b || d.kappa > 2 * b) ++violations;
      if (ni == 12) sizes += fmt::format(" m={}: |A|={} kappa={} bound={}", m, max_a, d.kappa, b);
    }
  return {worst <= 1e-12 && var_w >= 0.98 && violations == 0,
          fmt::format("k=1 max relative gap {:.2e} over 50 datasets; Var(W) {:.4f}; {} blocks checked, {} violations "
                      "(n_i=12{})",
                      worst, var_w, blocks_checked, violations, sizes)};
}

MomentTable scaled(MomentTable t, double c) {
  for (auto* v : {&t.l2, &t.l3, &t.l4})
    for (double& x : *v) x *= c;
  t.sigma2 *= c * c;
  return t;
}

MomentTable permuted(const MomentTable& t, std::span<const Index> perm) {
  MomentTable out = t;
  for (std::size_t i = 0; i < t.size(); ++i) {
    out.l2[perm[i]] = t.l2[i];
    out.l3[perm[i]] = t.l3[i];
    out.l4[perm[i]] = t.l4[i];
  }
  return out;
}

std::vector<double> shape_values(const MomentTable& t, const NeighborhoodSystem& sys, const DerivedNeighborhoods& d) {
  const std::size_t n = t.size(), k = d.kappa, tau = d.tau;
  return {bound_main(t, k, tau).value,
          bound_self_normalized(t, k, tau).value,
          bound_general_beta(t, sys, d).value,
          bound_graph(t, 3).value,
          bound_graph_self_normalized(t, 3).value,
          bound_constrained_u(t, n, 1).value,
          bound_constrained_u_self_normalized(t, n, 1).value,
          bound_decorated(t, n, 3).value,
          bound_decorated_self_normalized(t, n, 3).value,
          bound_distributed_general({t, t}, {k, k}, {tau, tau}).value};
}

Outcome structural_invariants() {
  std::mt19937_64 rng(kSuiteSeed + 11);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  double scale_gap = 0.0, w2_gap = 0.0, relabel_gap = 0.0, ks_gap = 0.0, beta_gap = 0.0;
  std::size_t kappa_tau_mismatch = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rng() % 30;
    const auto sys = random_system(rng, n, rep % 2 == 0, 0.05 + 0.15 * (rep % 3));
    const auto d = derive(sys);
    std::vector<double> x(n);
    for (double& v : x) v = unif(rng);
    const double sigma2 = 0.5 + static_cast<double>(n);
    const auto t = table_from_norms(x, sigma2);

    const double c = std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
    const auto base = shape_values(t, sys, d);
    const auto up = shape_values(scaled(t, c), sys, d);
    for (std::size_t q = 0; q < base.size(); ++q) scale_gap = std::max(scale_gap, rel_diff(base[q], up[q]));

    std::vector<double> sample(n), big(n);
    for (std::size_t i = 0; i < n; ++i) {
      sample[i] = std::normal_distribution<double>(0.0, 1.0)(rng);
      big[i] = c * sample[i];
    }
    const auto w = self_normalized_w2(sample, sys), wc = self_normalized_w2(big, sys);
    if (w.w2.has_value() != wc.w2.has_value()) w2_gap = 1.0;
    else if (w.w2) w2_gap = std::max(w2_gap, rel_diff(*w.w2, *wc.w2));

    const auto perm = random_permutation(rng, n);
    const auto rsys = relabel(sys, perm);
    const auto rd = derive(rsys);
    if (d.kappa != rd.kappa || d.tau != rd.tau) ++kappa_tau_mismatch;
    const auto moved = shape_values(permuted(t, perm), rsys, rd);
    for (std::size_t q = 0; q < base.size(); ++q) relabel_gap = std::max(relabel_gap, rel_diff(base[q], moved[q]));

    const auto ref = naive_beta(x, sys, std::sqrt(sigma2));
    const auto beta = bound_general_beta(t, sys, d);
    beta_gap = std::max({beta_gap, rel_diff(beta.term("beta1"), ref[0]),
                         rel_diff(beta.term("beta2"), std::sqrt(ref[1])),
                         rel_diff(beta.term("beta3"), std::sqrt(ref[2]))});
  }
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const auto ri = make_random_instance(kSuiteSeed + 12, rep, 8);
    const auto law = exact_law(*ri.field);
    const auto perm = random_permutation(rng, law.size());
    std::vector<double> values;
    for (std::size_t k = 0; k < law.outcomes(); ++k) {
      std::vector<double> row(law.size());
      for (std::size_t i = 0; i < law.size(); ++i) row[perm[i]] = law.row(k)[i];
      values.insert(values.end(), row.begin(), row.end());
    }
    const ExactLaw moved(law.size(), law.probs(), values);
    for (Statistic s : {Statistic::W1, Statistic::W2, Statistic::W2bar}) {
      const auto a = exact_kolmogorov(law, ri.sys, s);
      const auto b = exact_kolmogorov(moved, relabel(ri.sys, perm), s);
      ks_gap = std::max({ks_gap, std::abs(a.distance - b.distance), std::abs(a.rejected_mass - b.rejected_mass)});
    }
  }
  const bool ok = scale_gap <= 1e-12 && w2_gap <= 1e-12 && relabel_gap <= 1e-12 && kappa_tau_mismatch == 0 &&
                  ks_gap <= 1e-12 && beta_gap <= 1e-12;
  return {ok, fmt::format("scale {:.1e}, W2 scale {:.1e}, relabel shapes {:.1e}, kappa/tau mismatches {}, exact ks "
                          "{:.1e}, beta vs naive loops {:.1e}",
                          scale_gap, w2_gap, relabel_gap, kappa_tau_mismatch, ks_gap, beta_gap)};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

} // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "explicit-constant inequalities", explicit_constant_suite},
      {2, "fourth-moment inequality", fourth_moment_suite},
      {3, "test-function necessary condition", necessary_condition_suite},
      {4, "exact vs Monte-Carlo Kolmogorov", exact_vs_mc},
      {5, "i.i.d. rate", iid_rate},
      {6, "self-normalized regime", self_normalized_regime},
      {7, "m-dependent regime", m_dependent_regime},
      {8, "triangle-count regime", graph_regime},
      {9, "counter equivalence", oracle_equivalence},
      {10, "distributed U identities", distributed_identities},
      {11, "structural invariants", structural_invariants},
  };
  std::set<int> only;
  for (int a = 1; a < argc; ++a) only.insert(std::atoi(argv[a]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fmt::print("{} [{:2}] {}: {} ({:.1f}s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail, secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
