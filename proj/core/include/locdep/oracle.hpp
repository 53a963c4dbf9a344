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


#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locdep/bounds.hpp"
#include "locdep/enumeration.hpp"
#include "locdep/field.hpp"
#include "locdep/moments.hpp"
#include "locdep/neighborhood.hpp"
#include "locdep/statistics.hpp"

namespace locdep {

using Functional = std::function<double(std::span<const double>)>;

double exact_expectation(const ExactLaw& law, const Functional& fn);
double exact_expectation(const LatentSourceField& field, const Functional& fn,
                         std::uint64_t cap = kDefaultEnumerationCap, unsigned threads = 1);

/// Var(S) of an exact law.
double law_variance(const ExactLaw& law);

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

struct StatisticLaw {
  std::vector<Atom> atoms;     // sorted, merged within 1e-12 relative
  double rejected_mass = 0.0;  // W2 outcomes with V = 0
};

/// Law of W1, W2 or W2bar. W2 is conditioned on V > 0.
StatisticLaw statistic_law(const ExactLaw& law, const NeighborhoodSystem& sys, Statistic stat, double sigma);

/// sup_z |F(z) - Phi(z)| for a finite atom set, checking both one-sided
/// limits at every atom.
double kolmogorov_from_atoms(const std::vector<Atom>& atoms);

struct KolmogorovResult {
  double distance = 0.0;
  double rejected_mass = 0.0;
  std::size_t atoms = 0;
  double sigma = 0.0;
};

KolmogorovResult exact_kolmogorov(const ExactLaw& law, const NeighborhoodSystem& sys, Statistic stat);
KolmogorovResult exact_kolmogorov(const LatentSourceField& field, const NeighborhoodSystem& sys, Statistic stat,
                                  std::uint64_t cap = kDefaultEnumerationCap, unsigned threads = 1);

enum class Precondition { Satisfied, Violated, NotApplicable };
std::string to_string(Precondition p);

struct InequalityVerdict {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double margin = 0.0;  // rhs - lhs
  Precondition precondition = Precondition::NotApplicable;
  std::string digest;
  std::string detail;

  /// Inequality holds within 1e-10 max(1, |rhs|) and the precondition is not violated.
  bool pass() const noexcept;
  /// Precondition violated: the statement says nothing about this instance.
  bool vacuous() const noexcept { return precondition == Precondition::Violated; }
  /// Neither passing nor vacuous.
  bool failed() const noexcept { return !pass() && !vacuous(); }
};

InequalityVerdict make_verdict(std::string id, double lhs, double rhs, double constant, Precondition pre,
                               std::string digest, std::string detail = {});

/// Nonnegative functions of X_A.
struct XiFunction {
  enum class Kind { Constant, Abs, Square, AbsProduct, ClippedExp };
  Kind kind = Kind::Constant;
  double param = 1.0;  // constant value, or clip level for ClippedExp
  Index index = 0;     // a in A for the single-index kinds

  double operator()(std::span<const double> x, const IndexSet& a) const;
  std::string describe() const;
};

inline XiFunction xi_constant(double c) { return {XiFunction::Kind::Constant, c, 0}; }
inline XiFunction xi_zero() { return xi_constant(0.0); }

/// E xi^p with 0^0 = 1.
double xi_moment(const ExactLaw& law, const XiFunction& xi, const IndexSet& a, double p);

/// Everything the checkers need about one enumerable instance.
class ExactInstance {
public:
  ExactInstance(ExactLaw law, NeighborhoodSystem sys, std::string label = {});

  const ExactLaw& law() const noexcept { return law_; }
  const NeighborhoodSystem& system() const noexcept { return sys_; }
  const DerivedNeighborhoods& derived() const noexcept { return derived_; }
  const MomentTable& table() const noexcept { return table_; }
  double sigma() const noexcept { return table_.sigma(); }
  /// kappa sum ||X_i||_2^2 / sigma^2 with kappa from the system.
  double lambda() const noexcept { return lambda_; }
  const std::string& digest() const noexcept { return digest_; }

private:
  ExactLaw law_;
  NeighborhoodSystem sys_;
  DerivedNeighborhoods derived_;
  MomentTable table_;
  double lambda_ = 0.0;
  std::string digest_;
};

ExactInstance make_instance(const LatentSourceField& field, const NeighborhoodSystem& sys,
                            std::uint64_t cap = kDefaultEnumerationCap, unsigned threads = 1);

/// Quadratic-form bound: E{xi^p |sum_{N_A^c} sum_{A_i n N_A^c} (X_i X_j - E X_i X_j)|^2}
/// <= 4 ||xi||_p^p (gamma_A^2 + 4 gamma).
InequalityVerdict check_quadratic_form(const ExactInstance& inst, const IndexSet& a, const XiFunction& xi, double p);
/// Unrestricted form: E|sum_i sum_{A_i} (X_i X_j - E X_i X_j)|^2 <= 16 gamma.
InequalityVerdict check_quadratic_form_total(const ExactInstance& inst);
/// E{xi^p S_A^2} <= ||xi||_p^p (E S_A^2 + 2 gamma_A).
InequalityVerdict check_second_moment(const ExactInstance& inst, const IndexSet& a, const XiFunction& xi, double p);

/// Precondition of the fourth-moment bound for a given |A|.
Precondition fourth_moment_precondition(const MomentTable& table, std::size_t kappa, std::size_t tau,
                                        std::size_t set_size);
/// [0] E{xi^p S_A^4} <= 13 lambda sigma^4 E xi^p, [1] E S^4 <= 13 lambda sigma^4,
/// [2] E (sum Y_i)^4 <= 13 kappa^4 lambda sigma^4. The two unconditional
/// forms evaluate the precondition with |A| = 1.
std::vector<InequalityVerdict> check_fourth_moment(const ExactInstance& inst, const IndexSet& a, const XiFunction& xi,
                                              double p);

struct TestFunction {
  std::string name;
  std::function<double(double)> f;
};
/// clamp(w, -1, 1), tanh, sin, 2 Phi(w) - 1.
std::vector<TestFunction> standard_test_functions();
TestFunction zero_test_function();
/// Checks |f| <= 1 and |f'| <= 1 on a dense grid; throws InvalidTestFunction.
void validate_test_function(const TestFunction& fn);

Precondition r4_precondition(double kappa, double sum_abs3, double sigma);
/// sum_i |E{(X_i / Vbar) f(W2bar - Y_i / Vbar)}| <= 27 kappa^2 sigma^-3 sum E|X_i|^3
/// + 11 kappa^3 sigma^-4 sum E|X_i|^4, one verdict per function.
std::vector<InequalityVerdict> check_smooth_functional(const ExactInstance& inst, const std::vector<TestFunction>& fns);

/// Same checks for n i.i.d. copies of a centered two-point variable, reduced
/// exactly to the binomial count of the upper value. Feasible for n ~ 10^6.
struct TwoPointLaw {
  double lo = -1.0, hi = 1.0;
  double p_hi = 0.5;
};
std::vector<InequalityVerdict> check_smooth_functional_iid(const TwoPointLaw& law, std::size_t n,
                                                  const std::vector<TestFunction>& fns);
/// E S^4 <= 13 lambda sigma^4 with lambda = 1 for i.i.d. fields.
InequalityVerdict check_fourth_moment_iid(const TwoPointLaw& law, std::size_t n);

InequalityVerdict check_concentration(const ExactInstance& inst, const IndexSet& a, const IndexSet& b_set, double lo,
                              double hi, double c, const XiFunction& xi);
InequalityVerdict check_self_normalized_concentration(const ExactInstance& inst, const IndexSet& a, const IndexSet& b_set, double lo,
                              double hi, double c, const XiFunction& xi);

/// Exact factorization of the joint pmf for every (LD1) and (LD2) statement.
ValidationReport check_ld_independence(const ExactInstance& inst);

/// Random small latent-source field with its induced system plus random
/// A, B, interval, c and xi; deterministic in (seed, index).
struct RandomInstance {
  std::shared_ptr<LatentSourceField> field;
  NeighborhoodSystem sys;
  IndexSet a, b_set;
  double lo = 0.0, hi = 0.0, c = 1.0;
  XiFunction xi;
  double p = 1.0;
};
RandomInstance make_random_instance(std::uint64_t seed, std::uint64_t index, std::size_t max_n = 10);

} // namespace locdep
