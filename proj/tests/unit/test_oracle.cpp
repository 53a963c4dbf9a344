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

#include "locdep/families.hpp"
#include "locdep/normal.hpp"
#include "locdep/oracle.hpp"
#include "support/naive.hpp"

namespace locdep {
namespace {

using testing::random_permutation;
using testing::thrown_code;

double total(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }

ExactInstance instance_of(const LatentSourceField& f) { return ExactInstance(exact_law(f), induced_neighborhoods(f)); }

XiFunction xi_abs(Index a) { return {XiFunction::Kind::Abs, 1.0, a}; }

TEST(Expectation, MomentsOfIidSums) {
  for (std::size_t n = 1; n <= 12; ++n) {
    const auto law = exact_law(build_iid(n, rademacher()));
    const double nn = static_cast<double>(n);
    EXPECT_NEAR(exact_expectation(law, total), 0.0, 1e-12);
    EXPECT_NEAR(law_variance(law), nn, 1e-10);
    EXPECT_NEAR(exact_expectation(law, [](std::span<const double> x) { return std::pow(total(x), 4); }),
                3 * nn * nn - 2 * nn, 1e-8);
  }
}

TEST(Expectation, VarianceMatchesMomentTable) {
  const auto f = build_m_dependent(5, 2, DiscreteDist({-1.0, 0.5, 3.0}, {0.3, 0.5, 0.2}));
  const auto inst = instance_of(f);
  EXPECT_NEAR(law_variance(inst.law()), exact_moment_table(f, induced_neighborhoods(f)).sigma2, 1e-10);
  EXPECT_NEAR(exact_expectation(f, [](std::span<const double> x) { return total(x) * total(x); }), inst.sigma() * inst.sigma(),
              1e-10);
}

TEST(Expectation, IsLinear) {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> nd;
  const auto law = exact_law(build_m_dependent(4, 1, DiscreteDist({-2.0, 1.0}, {1.0 / 3, 2.0 / 3})));
  for (int rep = 0; rep < 20; ++rep) {
    const double a = nd(rng), b = nd(rng);
    const Functional f = [](std::span<const double> x) { return x[0] * x[1] + std::abs(x[2]); };
    const Functional g = [](std::span<const double> x) { return std::sin(total(x)); };
    const double lhs = exact_expectation(law, [&](std::span<const double> x) { return a * f(x) + b * g(x); });
    EXPECT_NEAR(lhs, a * exact_expectation(law, f) + b * exact_expectation(law, g), 1e-12);
  }
}

TEST(Kolmogorov, AtomExamples) {
  EXPECT_DOUBLE_EQ(kolmogorov_from_atoms({{0.0, 1.0}}), 0.5);
  const double km = kolmogorov_from_atoms({{-1.0, 0.5}, {1.0, 0.5}});
  EXPECT_NEAR(km, 0.5 - normal_cdf(-1.0), 1e-15);
  EXPECT_NEAR(km, 0.34134, 1e-5);
  const auto f = build_iid(1, rademacher());
  EXPECT_NEAR(exact_kolmogorov(f, induced_neighborhoods(f), Statistic::W1).distance, km, 1e-15);
}

TEST(Kolmogorov, DecreasesWithN) {
  double prev = 1.0;
  for (std::size_t n = 2; n <= 8; n += 2) {
    const auto f = build_iid(n, rademacher());
    const double ks = exact_kolmogorov(f, induced_neighborhoods(f), Statistic::W1).distance;
    EXPECT_LT(ks, prev);
    prev = ks;
  }
}

TEST(Kolmogorov, RelabelingLeavesW1Unchanged) {
  std::mt19937_64 rng(52);
  for (int rep = 0; rep < 10; ++rep) {
    const auto inst = make_random_instance(9, static_cast<std::uint64_t>(rep));
    if (!(inst.field->size() > 1)) continue;
    const auto law = exact_law(*inst.field);
    const auto perm = random_permutation(rng, law.size());
    std::vector<double> values;
    for (std::size_t k = 0; k < law.outcomes(); ++k) {
      std::vector<double> row(law.size());
      for (std::size_t i = 0; i < law.size(); ++i) row[perm[i]] = law.row(k)[i];
      values.insert(values.end(), row.begin(), row.end());
    }
    const ExactLaw moved(law.size(), law.probs(), values);
    for (Statistic s : {Statistic::W1, Statistic::W2, Statistic::W2bar}) {
      const auto a = exact_kolmogorov(law, inst.sys, s);
      const auto b = exact_kolmogorov(moved, relabel(inst.sys, perm), s);
      EXPECT_NEAR(a.distance, b.distance, 1e-12);
      EXPECT_NEAR(a.rejected_mass, b.rejected_mass, 1e-12);
    }
  }
}

TEST(Kolmogorov, SelfNormalizedRejectionsAreReported) {
  const auto f = build_iid(2, rademacher());
  // V = 0 exactly when X_1 = X_2
  const auto r = exact_kolmogorov(f, induced_neighborhoods(f), Statistic::W2);
  EXPECT_NEAR(r.rejected_mass, 0.5, 1e-15);
  const auto law = statistic_law(exact_law(f), induced_neighborhoods(f), Statistic::W2, std::sqrt(2.0));
  double mass = 0.0;
  for (const auto& a : law.atoms) mass += a.prob;
  EXPECT_NEAR(mass, 1.0, 1e-15);
}

TEST(QuadraticForm, IidRademacherTotal) {
  for (std::size_t n : {2u, 4u, 6u}) {
    const auto v = check_quadratic_form_total(instance_of(build_iid(n, rademacher())));
    EXPECT_NEAR(v.lhs, 0.0, 1e-12);
    EXPECT_NEAR(v.rhs, 16.0 * static_cast<double>(n), 1e-10);
    EXPECT_TRUE(v.pass());
  }
}

TEST(QuadraticForm, WindowFieldWithAbsXi) {
  const auto inst = instance_of(build_m_dependent(6, 1, rademacher()));
  const auto v = check_quadratic_form(inst, {2}, xi_abs(2), 1.0);
  EXPECT_TRUE(v.pass()) << v.lhs << " " << v.rhs;
  const auto z = check_quadratic_form(inst, {2}, xi_zero(), 1.0);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_TRUE(z.pass());
}

TEST(SecondMoment, ConstantAndFullSets) {
  const auto inst = instance_of(build_iid(4, rademacher()));
  const auto v = check_second_moment(inst, {0}, xi_constant(1.0), 1.0);
  EXPECT_NEAR(v.lhs, 3.0, 1e-12);
  EXPECT_NEAR(v.margin, 2.0 * 1.0, 1e-12);
  EXPECT_TRUE(v.pass());
  const auto full = check_second_moment(inst, {0, 1, 2, 3}, xi_constant(1.0), 1.0);
  EXPECT_EQ(full.lhs, 0.0);
  EXPECT_TRUE(full.pass());
}

TEST(FourthMoment, IidRademacherVerdicts) {
  for (std::size_t n = 2; n <= 12; n += 5) {
    const auto inst = instance_of(build_iid(n, rademacher()));
    const auto vs = check_fourth_moment(inst, {0}, xi_constant(1.0), 1.0);
    ASSERT_EQ(vs.size(), 3u);
    const double nn = static_cast<double>(n);
    EXPECT_NEAR(vs[1].lhs / (nn * nn), 3.0 - 2.0 / nn, 1e-10);
    for (const auto& v : vs) {
      EXPECT_FALSE(v.failed()) << v.id;
      EXPECT_GE(v.margin, 0.0) << v.id;
    }
    EXPECT_EQ(vs[1].precondition, Precondition::Violated);
    EXPECT_TRUE(vs[1].vacuous());
    EXPECT_FALSE(vs[1].pass());
  }
  const auto z = check_fourth_moment(instance_of(build_iid(3, rademacher())), {0}, xi_zero(), 1.0);
  EXPECT_EQ(z[0].lhs, 0.0);
  EXPECT_GE(z[0].margin, 0.0);
}

TEST(FourthMoment, BinomialReductionAgreesWithEnumeration) {
  const TwoPointLaw law{-0.6, 0.4, 0.6};
  for (std::size_t n : {3u, 7u, 11u}) {
    const auto iid = check_fourth_moment_iid(law, n);
    const auto f = build_iid(n, DiscreteDist({-0.6, 0.4}, {0.4, 0.6}));
    const auto full = check_fourth_moment(instance_of(f), {0}, xi_constant(1.0), 1.0)[1];
    EXPECT_NEAR(iid.lhs, full.lhs, 1e-10 * full.lhs);
    EXPECT_NEAR(iid.rhs, full.rhs, 1e-10 * full.rhs);
  }
  const auto big = check_fourth_moment_iid(TwoPointLaw{}, 1'000'000);
  EXPECT_EQ(big.precondition, Precondition::Satisfied);
  EXPECT_TRUE(big.pass());
  EXPECT_NEAR(big.lhs / 1e12, 3.0, 1e-5);
}

TEST(TestFunctions, CatalogIsValid) {
  const auto fns = standard_test_functions();
  EXPECT_EQ(fns.size(), 4u);
  for (const auto& f : fns) EXPECT_NO_THROW(validate_test_function(f));
  EXPECT_NO_THROW(validate_test_function(zero_test_function()));
  EXPECT_EQ(thrown_code([] { validate_test_function({"steep", [](double w) { return std::tanh(3 * w); }}); }),
            ErrorCode::InvalidTestFunction);
  EXPECT_EQ(thrown_code([] { validate_test_function({"big", [](double w) { return 2.0 + 0 * w; }}); }),
            ErrorCode::InvalidTestFunction);
}

TEST(SmoothFunctions, ExamplesPass) {
  const auto zero = check_smooth_functional(instance_of(build_iid(4, rademacher())), {zero_test_function()});
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0].lhs, 0.0);
  EXPECT_FALSE(zero[0].failed());
  for (const auto& v : check_smooth_functional(instance_of(build_iid(8, rademacher())), standard_test_functions()))
    EXPECT_FALSE(v.failed()) << v.id << " " << v.detail;
  for (const auto& v : check_smooth_functional(instance_of(build_m_dependent(6, 1, rademacher())), standard_test_functions()))
    EXPECT_FALSE(v.failed()) << v.id << " " << v.detail;
}

TEST(SmoothFunctions, BinomialReductionAgreesWithEnumeration) {
  const TwoPointLaw law{-1.0, 1.0, 0.5};
  const auto fns = standard_test_functions();
  for (std::size_t n : {4u, 9u}) {
    const auto iid = check_smooth_functional_iid(law, n, fns);
    const auto full = check_smooth_functional(instance_of(build_iid(n, rademacher())), fns);
    ASSERT_EQ(iid.size(), full.size());
    for (std::size_t q = 0; q < iid.size(); ++q) {
      EXPECT_NEAR(iid[q].lhs, full[q].lhs, 1e-12);
      EXPECT_NEAR(iid[q].rhs, full[q].rhs, 1e-9 * full[q].rhs);
      EXPECT_EQ(iid[q].precondition, full[q].precondition);
    }
  }
}

TEST(Concentration, ThreeQuarterExample) {
  const auto inst = instance_of(build_iid(4, rademacher()));
  const auto v = check_concentration(inst, {0}, {1}, 0.0, 0.0, 1.0, xi_abs(0));
  EXPECT_NEAR(v.lhs, 0.75, 1e-15);
  EXPECT_GT(v.rhs, 0.75);
  EXPECT_TRUE(v.pass());
  EXPECT_EQ(check_concentration(inst, {0}, {1}, 0.0, 0.0, 1.0, xi_zero()).lhs, 0.0);
  const auto wide = check_concentration(inst, {0}, {1}, -1.0, 1.0, 1.0, xi_abs(0));
  EXPECT_GE(wide.lhs, v.lhs);
  EXPECT_GE(wide.rhs, v.rhs);
}

TEST(Concentration, SelfNormalizedExample) {
  const auto inst = instance_of(build_iid(6, rademacher()));
  const auto v = check_self_normalized_concentration(inst, {0}, {1}, 0.0, 0.0, 1.0, xi_constant(1.0));
  EXPECT_TRUE(v.pass()) << v.detail;
  EXPECT_EQ(v.detail.find("side_assertion_failed"), std::string::npos);
  EXPECT_TRUE(check_self_normalized_concentration(inst, {0}, {1}, 0.0, 0.0, 1.0, xi_zero()).pass());
}

TEST(Factorization, ShrunkMovingSumsFail) {
  const auto f = build_m_dependent(3, 1, rademacher());
  EXPECT_TRUE(check_ld_independence(instance_of(f)).ok());
  EXPECT_TRUE(check_ld_independence(instance_of(build_iid(4, rademacher()))).ok());
  auto a = induced_neighborhoods(f).neighborhoods();
  a[0] = {0};
  const auto report = check_ld_independence(ExactInstance(exact_law(f), NeighborhoodSystem::with_default_cover(a)));
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().kind, Violation::Kind::LD1Dependence);
  EXPECT_EQ(report.violations.front().i, 0u);
}

TEST(Instances, RandomSuitePassesAndIsDeterministic) {
  int vacuous = 0;
  for (std::uint64_t k = 0; k < 15; ++k) {
    const auto a = make_random_instance(77, k);
    const auto b = make_random_instance(77, k);
    ASSERT_EQ(a.field->size(), b.field->size());
    EXPECT_EQ(a.a, b.a);
    EXPECT_EQ(a.b_set, b.b_set);
    EXPECT_EQ(a.c, b.c);
    EXPECT_GE(a.c, 1.0);
    EXPECT_LE(a.lo, a.hi);
    const ExactInstance inst(exact_law(*a.field), a.sys);
    if (!(inst.sigma() > 0.0)) continue;
    EXPECT_TRUE(check_ld_independence(inst).ok());
    std::vector<InequalityVerdict> vs{check_quadratic_form(inst, a.a, a.xi, a.p), check_quadratic_form_total(inst),
                                      check_second_moment(inst, a.a, a.xi, a.p),
                                      check_concentration(inst, a.a, a.b_set, a.lo, a.hi, a.c, a.xi),
                                      check_self_normalized_concentration(inst, a.a, a.b_set, a.lo, a.hi, a.c, a.xi)};
    for (const auto& v : check_fourth_moment(inst, a.a, a.xi, a.p)) vs.push_back(v);
    for (const auto& v : check_smooth_functional(inst, standard_test_functions())) vs.push_back(v);
    for (const auto& v : vs) {
      EXPECT_FALSE(v.failed()) << v.id << " " << v.detail;
      vacuous += v.vacuous();
    }
  }
  RecordProperty("vacuous", vacuous);
}

TEST(Verdicts, TriState) {
  auto v = make_verdict("x", 1.0, 2.0, 1.0, Precondition::Satisfied, "d");
  EXPECT_TRUE(v.pass());
  EXPECT_DOUBLE_EQ(v.margin, 1.0);
  v = make_verdict("x", 2.0, 1.0, 1.0, Precondition::Satisfied, "d");
  EXPECT_TRUE(v.failed());
  v = make_verdict("x", 2.0, 1.0, 1.0, Precondition::Violated, "d");
  EXPECT_TRUE(v.vacuous());
  EXPECT_FALSE(v.failed());
  v = make_verdict("x", 1.0 + 5e-11, 1.0, 1.0, Precondition::NotApplicable, "d");
  EXPECT_TRUE(v.pass());
}

} // namespace
} // namespace locdep
