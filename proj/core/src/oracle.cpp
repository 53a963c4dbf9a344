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

#include "locdep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "locdep/error.hpp"
#include "locdep/families.hpp"
#include "locdep/normal.hpp"
#include "locdep/rng.hpp"

namespace locdep {

double exact_expectation(const ExactLaw& law, const Functional& fn) { return law.expectation(fn); }

double exact_expectation(const LatentSourceField& field, const Functional& fn, std::uint64_t cap, unsigned threads) {
  return exact_law(field, cap, threads).expectation(fn);
}

double law_variance(const ExactLaw& law) {
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const double s = pairwise_sum(law.row(k));
    m1 += law.prob(k) * s;
    m2 += law.prob(k) * s * s;
  }
  return std::max(0.0, m2 - m1 * m1);
}

namespace {

std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    if (!out.empty() && std::abs(a.value - out.back().value) <= 1e-12 * std::max(1.0, std::abs(a.value)))
      out.back().prob += a.prob;
    else
      out.push_back(a);
  }
  return out;
}

std::uint64_t hash_doubles(std::uint64_t h, std::span<const double> v) {
  for (double d : v) {
    d += 0.0;  // -0 and +0 hash alike
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    h = mix64(h ^ mix64(bits));
  }
  return h;
}

std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

double sum_l4_pow(const MomentTable& t, int p) {
  double s = 0.0;
  for (double a : t.l4) s += std::pow(a, p);
  return s;
}

double sum_l3_cubes(const MomentTable& t) {
  double s = 0.0;
  for (double a : t.l3) s += a * a * a;
  return s;
}

// 0^0 = 1 convention of the moment bounds.
double pow0(double x, double p) { return p == 0.0 ? 1.0 : std::pow(x, p); }

IndexSet complement(std::size_t n, const IndexSet& s) {
  IndexSet out;
  for (Index i = 0; i < n; ++i)
    if (!contains(s, i)) out.push_back(i);
  return out;
}

std::string set_label(const IndexSet& s) {
  std::string out = "{";
  for (std::size_t t = 0; t < s.size(); ++t) out += (t ? "," : "") + std::to_string(s[t] + 1);
  return out + "}";
}

void require_positive_sigma(const ExactInstance& inst) {
  if (!(inst.sigma() > 0.0)) throw Error(ErrorCode::DegenerateVariance, "instance has zero variance");
}

} // namespace

StatisticLaw statistic_law(const ExactLaw& law, const NeighborhoodSystem& sys, Statistic stat, double sigma) {
  if (stat != Statistic::W2 && !(sigma > 0.0))
    throw Error(ErrorCode::DegenerateVariance, "W1 and W2bar need sigma > 0");
  StatisticLaw out;
  std::vector<Atom> atoms;
  atoms.reserve(law.outcomes());
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const auto v = evaluate_statistics(law.row(k), sys, sigma);
    switch (stat) {
    case Statistic::W1: atoms.push_back({v.s / sigma, law.prob(k)}); break;
    case Statistic::W2bar: atoms.push_back({v.w2bar, law.prob(k)}); break;
    case Statistic::W2:
      if (v.w2)
        atoms.push_back({*v.w2, law.prob(k)});
      else
        out.rejected_mass += law.prob(k);
      break;
    }
  }
  out.atoms = merge_atoms(std::move(atoms));
  const double kept = 1.0 - out.rejected_mass;
  if (stat == Statistic::W2 && kept > 0.0 && out.rejected_mass > 0.0)
    for (auto& a : out.atoms) a.prob /= kept;
  return out;
}

double kolmogorov_from_atoms(const std::vector<Atom>& atoms) {
  double f = 0.0, d = 0.0;
  for (const auto& a : atoms) {
    const double phi = normal_cdf(a.value);
    d = std::max(d, std::abs(f - phi));
    f += a.prob;
    d = std::max(d, std::abs(f - phi));
  }
  return std::min(d, 1.0);
}

KolmogorovResult exact_kolmogorov(const ExactLaw& law, const NeighborhoodSystem& sys, Statistic stat) {
  KolmogorovResult r;
  r.sigma = std::sqrt(law_variance(law));
  const StatisticLaw sl = statistic_law(law, sys, stat, r.sigma);
  r.rejected_mass = sl.rejected_mass;
  r.atoms = sl.atoms.size();
  r.distance = sl.atoms.empty() ? 1.0 : kolmogorov_from_atoms(sl.atoms);
  return r;
}

KolmogorovResult exact_kolmogorov(const LatentSourceField& field, const NeighborhoodSystem& sys, Statistic stat,
                                  std::uint64_t cap, unsigned threads) {
  return exact_kolmogorov(exact_law(field, cap, threads), sys, stat);
}

std::string to_string(Precondition p) {
  switch (p) {
  case Precondition::Satisfied: return "satisfied";
  case Precondition::Violated: return "violated";
  case Precondition::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

bool InequalityVerdict::pass() const noexcept {
  return precondition != Precondition::Violated && margin >= -1e-10 * std::max(1.0, std::abs(rhs));
}

InequalityVerdict make_verdict(std::string id, double lhs, double rhs, double constant, Precondition pre,
                               std::string digest, std::string detail) {
  InequalityVerdict v;
  v.id = std::move(id);
  v.lhs = lhs;
  v.rhs = rhs;
  v.constant = constant;
  v.margin = rhs - lhs;
  v.precondition = pre;
  v.digest = std::move(digest);
  v.detail = std::move(detail);
  return v;
}

double XiFunction::operator()(std::span<const double> x, const IndexSet& a) const {
  switch (kind) {
  case Kind::Constant: return param;
  case Kind::Abs: return std::abs(x[index]);
  case Kind::Square: return x[index] * x[index];
  case Kind::AbsProduct: {
    double v = 1.0;
    for (Index i : a) v *= std::abs(x[i]);
    return v;
  }
  case Kind::ClippedExp: return std::min(std::exp(x[index]), param);
  }
  return 0.0;
}

std::string XiFunction::describe() const {
  const std::string at = std::to_string(index + 1);
  switch (kind) {
  case Kind::Constant: {
    std::ostringstream os;
    os << "const(" << param << ")";
    return os.str();
  }
  case Kind::Abs: return "abs(X" + at + ")";
  case Kind::Square: return "sq(X" + at + ")";
  case Kind::AbsProduct: return "prod_abs(X_A)";
  case Kind::ClippedExp: {
    std::ostringstream os;
    os << "min(exp(X" << at << ")," << param << ")";
    return os.str();
  }
  }
  return "unknown";
}

double xi_moment(const ExactLaw& law, const XiFunction& xi, const IndexSet& a, double p) {
  return law.expectation([&](std::span<const double> x) { return pow0(xi(x, a), p); });
}

ExactInstance::ExactInstance(ExactLaw law, NeighborhoodSystem sys, std::string label)
    : law_(std::move(law)), sys_(std::move(sys)) {
  if (sys_.size() != law_.size()) throw Error(ErrorCode::InvalidSize, "law and system sizes differ");
  derived_ = derive(sys_);
  table_ = exact_moment_table(law_, sys_);
  double s2 = 0.0;
  for (double v : table_.l2) s2 += v * v;
  lambda_ = table_.sigma2 > 0.0 ? static_cast<double>(derived_.kappa) * s2 / table_.sigma2 : 0.0;
  std::uint64_t h = mix64(law_.size() ^ (std::uint64_t{law_.outcomes()} << 20));
  h = hash_doubles(h, law_.probs());
  for (std::size_t k = 0; k < law_.outcomes(); ++k) h = hash_doubles(h, law_.row(k));
  for (const auto& a : sys_.neighborhoods())
    for (Index j : a) h = mix64(h ^ j);
  digest_ = label.empty() ? hex(h) : label + ":" + hex(h);
}

ExactInstance make_instance(const LatentSourceField& field, const NeighborhoodSystem& sys, std::uint64_t cap,
                            unsigned threads) {
  return ExactInstance(exact_law(field, cap, threads), sys, field.metadata().family);
}

InequalityVerdict check_quadratic_form(const ExactInstance& inst, const IndexSet& a, const XiFunction& xi, double p) {
  const auto& law = inst.law();
  const auto& sys = inst.system();
  const std::size_t n = law.size();
  const IndexSet outside = complement(n, reverse_closure(sys, a));
  std::vector<std::vector<double>> exy(n);
  for (Index i : outside)
    for (Index j : sys.neighborhood(i))
      if (contains(outside, j)) exy[i].push_back(law.expectation([&](std::span<const double> x) { return x[i] * x[j]; }));
  double lhs = 0.0, exi = 0.0;
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const auto x = law.row(k);
    double q = 0.0;
    for (Index i : outside) {
      std::size_t t = 0;
      for (Index j : sys.neighborhood(i))
        if (contains(outside, j)) q += x[i] * x[j] - exy[i][t++];
    }
    const double w = pow0(xi(x, a), p);
    lhs += law.prob(k) * w * q * q;
    exi += law.prob(k) * w;
  }
  const double ga = gamma_set(inst.table(), sys, a);
  const double g = gamma_full(inst.table(), sys, inst.derived());
  const double rhs = 4.0 * exi * (ga * ga + 4.0 * g);
  std::ostringstream detail;
  detail << "A=" << set_label(a) << " xi=" << xi.describe() << " p=" << p << " gamma_A=" << ga << " gamma=" << g;
  return make_verdict("quadratic_form", lhs, rhs, 4.0, Precondition::NotApplicable, inst.digest(), detail.str());
}

InequalityVerdict check_quadratic_form_total(const ExactInstance& inst) {
  const auto& law = inst.law();
  const auto& sys = inst.system();
  const std::size_t n = law.size();
  std::vector<std::vector<double>> exy(n);
  for (Index i = 0; i < n; ++i)
    for (Index j : sys.neighborhood(i))
      exy[i].push_back(law.expectation([&](std::span<const double> x) { return x[i] * x[j]; }));
  double lhs = 0.0;
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const auto x = law.row(k);
    double q = 0.0;
    for (Index i = 0; i < n; ++i) {
      std::size_t t = 0;
      for (Index j : sys.neighborhood(i)) q += x[i] * x[j] - exy[i][t++];
    }
    lhs += law.prob(k) * q * q;
  }
  const double g = gamma_full(inst.table(), sys, inst.derived());
  return make_verdict("quadratic_form_total", lhs, 16.0 * g, 16.0, Precondition::NotApplicable, inst.digest(),
                      "gamma=" + std::to_string(g));
}

InequalityVerdict check_second_moment(const ExactInstance& inst, const IndexSet& a, const XiFunction& xi, double p) {
  const auto& law = inst.law();
  const IndexSet outside = complement(law.size(), reverse_closure(inst.system(), a));
  double lhs = 0.0, exi = 0.0, es2 = 0.0;
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const auto x = law.row(k);
    double s = 0.0;
    for (Index i : outside) s += x[i];
    const double w = pow0(xi(x, a), p);
    lhs += law.prob(k) * w * s * s;
    exi += law.prob(k) * w;
    es2 += law.prob(k) * s * s;
  }
  const double ga = gamma_set(inst.table(), inst.system(), a);
  const double rhs = exi * (es2 + 2.0 * ga);
  std::ostringstream detail;
  detail << "A=" << set_label(a) << " xi=" << xi.describe() << " p=" << p << " E S_A^2=" << es2;
  return make_verdict("second_moment", lhs, rhs, 2.0, Precondition::NotApplicable, inst.digest(), detail.str());
}

Precondition fourth_moment_precondition(const MomentTable& table, std::size_t kappa, std::size_t tau,
                                        std::size_t set_size) {
  const double sg = table.sigma();
  if (!(sg > 0.0)) return Precondition::Violated;
  const double k = static_cast<double>(kappa), t = static_cast<double>(tau), a = static_cast<double>(set_size);
  const double first = a * a * k * k * sum_l4_pow(table, 3) / (sg * sg * sg);
  const double second = std::sqrt(a) * std::sqrt(k) * (k + std::sqrt(t)) * std::sqrt(sum_l4_pow(table, 4)) / (sg * sg);
  return first <= 1.0 / 500.0 && second <= 1.0 / 500.0 ? Precondition::Satisfied : Precondition::Violated;
}

std::vector<InequalityVerdict> check_fourth_moment(const ExactInstance& inst, const IndexSet& a, const XiFunction& xi,
                                              double p) {
  require_positive_sigma(inst);
  const auto& law = inst.law();
  const auto& sys = inst.system();
  const IndexSet outside = complement(law.size(), reverse_closure(sys, a));
  double lhs = 0.0, exi = 0.0, es4 = 0.0, ey4 = 0.0;
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const auto x = law.row(k);
    double sa = 0.0, s = 0.0, ysum = 0.0;
    for (Index i : outside) sa += x[i];
    for (Index i = 0; i < law.size(); ++i) {
      s += x[i];
      for (Index j : sys.neighborhood(i)) ysum += x[j];
    }
    const double w = pow0(xi(x, a), p);
    const double pr = law.prob(k);
    lhs += pr * w * sa * sa * sa * sa;
    exi += pr * w;
    es4 += pr * s * s * s * s;
    ey4 += pr * ysum * ysum * ysum * ysum;
  }
  const std::size_t kappa = inst.derived().kappa, tau = inst.derived().tau;
  const double sg4 = std::pow(inst.sigma(), 4);
  const double lam = inst.lambda();
  const double k4 = std::pow(static_cast<double>(kappa), 4);
  const Precondition pre_a = fourth_moment_precondition(inst.table(), kappa, tau, a.size());
  const Precondition pre_1 = fourth_moment_precondition(inst.table(), kappa, tau, 1);
  std::ostringstream detail;
  detail << "A=" << set_label(a) << " xi=" << xi.describe() << " p=" << p << " lambda=" << lam;
  std::vector<InequalityVerdict> out;
  out.push_back(make_verdict("fourth_moment", lhs, 13.0 * lam * sg4 * exi, 13.0, pre_a, inst.digest(), detail.str()));
  out.push_back(make_verdict("fourth_moment_total", es4, 13.0 * lam * sg4, 13.0, pre_1, inst.digest(),
                             "lambda=" + std::to_string(lam)));
  out.push_back(make_verdict("fourth_moment_ysum", ey4, 13.0 * k4 * lam * sg4, 13.0, pre_1, inst.digest(),
                             "lambda=" + std::to_string(lam)));
  return out;
}

std::vector<TestFunction> standard_test_functions() {
  return {
      {"clamp", [](double w) { return std::clamp(w, -1.0, 1.0); }},
      {"tanh", [](double w) { return std::tanh(w); }},
      {"sine", [](double w) { return std::sin(w); }},
      {"smooth_step", [](double w) { return 2.0 * normal_cdf(w) - 1.0; }},
  };
}

TestFunction zero_test_function() {
  return {"zero", [](double) { return 0.0; }};
}

void validate_test_function(const TestFunction& fn) {
  if (!fn.f) throw Error(ErrorCode::InvalidTestFunction, "test function '" + fn.name + "' is empty");
  constexpr int kPoints = 200000;
  constexpr double kLo = -50.0, kHi = 50.0;
  const double h = (kHi - kLo) / kPoints;
  double prev = fn.f(kLo);
  for (int t = 0; t <= kPoints; ++t) {
    const double w = kLo + h * t;
    const double v = fn.f(w);
    if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-12)
      throw Error(ErrorCode::InvalidTestFunction, "test function '" + fn.name + "' exceeds 1 in absolute value");
    if (t > 0 && std::abs(v - prev) > (1.0 + 1e-9) * h)
      throw Error(ErrorCode::InvalidTestFunction, "test function '" + fn.name + "' has slope above 1");
    prev = v;
  }
}

Precondition r4_precondition(double kappa, double sum_abs3, double sigma) {
  if (!(sigma > 0.0)) return Precondition::Violated;
  return kappa * kappa * sum_abs3 / (sigma * sigma * sigma) <= 1.0 / 500.0 ? Precondition::Satisfied
                                                                            : Precondition::Violated;
}

std::vector<InequalityVerdict> check_smooth_functional(const ExactInstance& inst, const std::vector<TestFunction>& fns) {
  require_positive_sigma(inst);
  for (const auto& f : fns) validate_test_function(f);
  const auto& law = inst.law();
  const auto& sys = inst.system();
  const std::size_t n = law.size();
  const double sg = inst.sigma();
  std::vector<std::vector<double>> acc(fns.size(), std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const auto x = law.row(k);
    const auto y = neighborhood_sums(x, sys);
    const auto cw = clamped_w2bar(x, sys, sg);
    for (std::size_t f = 0; f < fns.size(); ++f)
      for (std::size_t i = 0; i < n; ++i)
        acc[f][i] += law.prob(k) * x[i] / cw.vbar * fns[f].f(cw.w2bar - y[i] / cw.vbar);
  }
  const double kappa = static_cast<double>(inst.derived().kappa);
  const double s3 = sum_l3_cubes(inst.table()), s4 = sum_l4_pow(inst.table(), 4);
  const double rhs = 27.0 * kappa * kappa * s3 / std::pow(sg, 3) + 11.0 * std::pow(kappa, 3) * s4 / std::pow(sg, 4);
  const Precondition pre = r4_precondition(kappa, s3, sg);
  std::vector<InequalityVerdict> out;
  for (std::size_t f = 0; f < fns.size(); ++f) {
    double lhs = 0.0;
    for (double v : acc[f]) lhs += std::abs(v);
    out.push_back(make_verdict("smooth_functional", lhs, rhs, 27.0, pre, inst.digest(), "f=" + fns[f].name));
  }
  return out;
}

namespace {

struct TwoPointMoments {
  double v2, m3, m4;  // E X^2, E|X|^3, E X^4
};

TwoPointMoments two_point_moments(const TwoPointLaw& law) {
  const double q = law.p_hi;
  if (!(q > 0.0 && q < 1.0) || !(law.lo < law.hi))
    throw Error(ErrorCode::InvalidArgument, "two-point law needs lo < hi and 0 < p_hi < 1");
  const double mean = (1.0 - q) * law.lo + q * law.hi;
  if (std::abs(mean) > 1e-12 * std::max(std::abs(law.lo), std::abs(law.hi)))
    throw Error(ErrorCode::InvalidArgument, "two-point law must be centered");
  auto mom = [&](double p) { return (1.0 - q) * std::pow(std::abs(law.lo), p) + q * std::pow(std::abs(law.hi), p); };
  return {mom(2), mom(3), mom(4)};
}

// log of the Binomial(n, q) pmf at k.
double log_binom_pmf(std::size_t n, std::size_t k, double q) {
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) + kk * std::log(q) +
         (nn - kk) * std::log1p(-q);
}

std::string two_point_label(const TwoPointLaw& law, std::size_t n) {
  std::ostringstream os;
  os << "iid_two_point(" << law.lo << "," << law.hi << ";" << law.p_hi << ")_n" << n;
  return os.str();
}

} // namespace

std::vector<InequalityVerdict> check_smooth_functional_iid(const TwoPointLaw& law, std::size_t n,
                                                  const std::vector<TestFunction>& fns) {
  if (n < 2) throw Error(ErrorCode::InvalidSize, "need n >= 2");
  for (const auto& f : fns) validate_test_function(f);
  const TwoPointMoments mo = two_point_moments(law);
  const double nn = static_cast<double>(n);
  const double sg = std::sqrt(nn * mo.v2);
  const double q = law.p_hi;
  // By exchangeability every index contributes the same expectation;
  // condition on X_1 = x and the count K' of upper values among the rest.
  std::vector<long double> acc(fns.size(), 0.0L);
  for (int up = 0; up <= 1; ++up) {
    const double x = up ? law.hi : law.lo;
    const double px = up ? q : 1.0 - q;
    for (std::size_t kr = 0; kr + 1 <= n; ++kr) {
      const double lp = log_binom_pmf(n - 1, kr, q);
      if (lp < -745.0) continue;
      const double w = px * std::exp(lp);
      const double kk = static_cast<double>(kr + static_cast<std::size_t>(up));
      const double s = (nn - kk) * law.lo + kk * law.hi;
      const double sxy = (nn - kk) * law.lo * law.lo + kk * law.hi * law.hi;
      const double vbar = psi_clamp(sxy, sg);
      for (std::size_t f = 0; f < fns.size(); ++f)
        acc[f] += static_cast<long double>(w * x / vbar * fns[f].f((s - x) / vbar));
    }
  }
  const double s3 = nn * mo.m3, s4 = nn * mo.m4;
  const double rhs = 27.0 * s3 / std::pow(sg, 3) + 11.0 * s4 / std::pow(sg, 4);
  const Precondition pre = r4_precondition(1.0, s3, sg);
  const std::string digest = two_point_label(law, n);
  std::vector<InequalityVerdict> out;
  for (std::size_t f = 0; f < fns.size(); ++f) {
    const double lhs = nn * std::abs(static_cast<double>(acc[f]));
    out.push_back(make_verdict("smooth_functional", lhs, rhs, 27.0, pre, digest, "f=" + fns[f].name + " binomial_reduction"));
  }
  return out;
}

InequalityVerdict check_fourth_moment_iid(const TwoPointLaw& law, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidSize, "need n >= 1");
  const TwoPointMoments mo = two_point_moments(law);
  const double nn = static_cast<double>(n);
  const double q = law.p_hi;
  long double es4 = 0.0L;
  for (std::size_t k = 0; k <= n; ++k) {
    const double lp = log_binom_pmf(n, k, q);
    if (lp < -745.0) continue;
    const long double kk = static_cast<long double>(k);
    const long double s = (nn - kk) * law.lo + kk * law.hi;
    es4 += std::exp(static_cast<long double>(lp)) * s * s * s * s;
  }
  const double sg2 = nn * mo.v2;
  const double l4 = std::pow(mo.m4, 0.25);
  const double first = nn * l4 * l4 * l4 / std::pow(sg2, 1.5);
  const double second = 2.0 * std::sqrt(nn * mo.m4) / sg2;
  const Precondition pre =
      first <= 1.0 / 500.0 && second <= 1.0 / 500.0 ? Precondition::Satisfied : Precondition::Violated;
  std::ostringstream detail;
  detail << "E(S/sigma)^4=" << static_cast<double>(es4) / (sg2 * sg2) << " precondition_terms=" << first << ","
         << second << " binomial_reduction";
  return make_verdict("fourth_moment_total", static_cast<double>(es4), 13.0 * sg2 * sg2, 13.0, pre,
                      two_point_label(law, n), detail.str());
}

InequalityVerdict check_concentration(const ExactInstance& inst, const IndexSet& a, const IndexSet& b_set, double lo,
                              double hi, double c, const XiFunction& xi) {
  require_positive_sigma(inst);
  const auto& law = inst.law();
  const ConcentrationDeltas d = concentration_deltas(inst.table(), inst.system(), inst.derived(), a, b_set, lo, hi, c);
  const IndexSet outside = complement(law.size(), reverse_closure(inst.system(), a));
  const double sg = inst.sigma();
  double lhs = 0.0, xi43 = 0.0;
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const auto x = law.row(k);
    double sa = 0.0, sb = 0.0;
    for (Index i : outside) sa += x[i];
    for (Index m : b_set) sb += std::abs(x[m]);
    const double eta = lo - c * sb / sg, zeta = hi + c * sb / sg;
    const double w = sa / sg;
    const double xv = xi(x, a);
    if (eta <= w && w <= zeta) lhs += law.prob(k) * xv;
    xi43 += law.prob(k) * std::pow(xv, 4.0 / 3.0);
  }
  const double rhs = 156.0 * std::pow(xi43, 0.75) * d.sum();
  std::ostringstream detail;
  detail << "A=" << set_label(a) << " B=" << set_label(b_set) << " a=" << lo << " b=" << hi << " c=" << c
         << " xi=" << xi.describe() << " sum_delta=" << d.sum();
  return make_verdict("concentration", lhs, rhs, 156.0, Precondition::NotApplicable, inst.digest(),
                      detail.str());
}

InequalityVerdict check_self_normalized_concentration(const ExactInstance& inst, const IndexSet& a, const IndexSet& b_set, double lo,
                              double hi, double c, const XiFunction& xi) {
  require_positive_sigma(inst);
  const auto& law = inst.law();
  const auto& sys = inst.system();
  const auto& derived = inst.derived();
  const SelfNormalizedConcentrationDeltas d = self_normalized_concentration_deltas(inst.table(), sys, derived, a, b_set, lo, hi, c);
  const IndexSet near = reverse_closure(sys, a);
  const IndexSet outside = complement(law.size(), near);
  const double sg = inst.sigma();
  double lhs = 0.0, xi43 = 0.0;
  bool side_ok = true;
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const auto x = law.row(k);
    double sa = 0.0, quad = 0.0, sb = 0.0, t2 = 0.0;
    for (Index kk : outside) {
      sa += x[kk];
      for (Index l : sys.neighborhood(kk))
        if (contains(outside, l)) quad += x[kk] * x[l];
    }
    for (Index kk : near) {
      for (Index l : sys.neighborhood(kk)) t2 += std::abs(x[kk] * x[l]);
      for (Index l : derived.reverse[kk]) t2 += std::abs(x[kk] * x[l]);
    }
    t2 /= sg * sg;
    for (Index m : b_set) sb += std::abs(x[m]);
    const double vbar = psi_clamp(quad, sg);
    const double qa = std::min(1.0, std::sqrt(t2));
    side_ok = side_ok && qa <= 1.0 && vbar >= 0.5 * sg * (1 - 1e-12) && vbar <= std::sqrt(2.0) * sg * (1 + 1e-12);
    const double spread = c * sb / sg + c * std::abs(sa) * qa / sg;
    const double w = sa / vbar;
    const double xv = xi(x, a);
    if (lo - spread <= w && w <= hi + spread) lhs += law.prob(k) * xv;
    xi43 += law.prob(k) * std::pow(xv, 4.0 / 3.0);
  }
  const double rhs = 8755.0 * std::pow(xi43, 0.75) * d.sum();
  std::ostringstream detail;
  detail << "A=" << set_label(a) << " B=" << set_label(b_set) << " a=" << lo << " b=" << hi << " c=" << c
         << " xi=" << xi.describe() << " lambda=" << d.lambda << (side_ok ? "" : " side_assertion_failed");
  auto v = make_verdict("self_normalized_concentration", lhs, rhs, 8755.0, Precondition::NotApplicable,
                        inst.digest(), detail.str());
  if (!side_ok) v.margin = -std::abs(v.margin) - 1.0;
  return v;
}

namespace {

// True when the pmf of (U, V) factorizes, U keyed by `left`, V by `right`.
bool factorizes(const ExactLaw& law, const std::vector<Index>& left, const std::vector<Index>& right) {
  struct Cell {
    std::uint64_t u = 0, v = 0;
    double p = 0.0;
  };
  std::unordered_map<std::uint64_t, double> pu, pv;
  std::unordered_map<std::uint64_t, Cell> joint;
  std::vector<double> buf;
  auto key = [&](std::span<const double> x, const std::vector<Index>& idx, std::uint64_t salt) {
    buf.clear();
    for (Index i : idx) buf.push_back(x[i]);
    return hash_doubles(salt, buf);
  };
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const auto x = law.row(k);
    const std::uint64_t ku = key(x, left, 0x5555), kv = key(x, right, 0xaaaa);
    pu[ku] += law.prob(k);
    pv[kv] += law.prob(k);
    Cell& c = joint[mix64(ku ^ mix64(kv + 0x9e37))];
    c.u = ku, c.v = kv, c.p += law.prob(k);
  }
  // Every joint cell must match the product, and the product mass must not
  // leak onto cells the joint law never visits.
  double covered = 0.0;
  for (const auto& [k, c] : joint) {
    const double prod = pu.at(c.u) * pv.at(c.v);
    if (std::abs(c.p - prod) > 1e-12 + 1e-9 * prod) return false;
    covered += prod;
  }
  return covered >= 1.0 - 1e-10;
}

} // namespace

ValidationReport check_ld_independence(const ExactInstance& inst) {
  ValidationReport report = validate_structure(inst.system());
  if (!report.ok()) return report;
  const auto& law = inst.law();
  const auto& sys = inst.system();
  const std::size_t n = law.size();
  for (Index i = 0; i < n; ++i) {
    const IndexSet out = complement(n, sys.neighborhood(i));
    if (!out.empty() && !factorizes(law, {i}, out))
      report.violations.push_back({Violation::Kind::LD1Dependence, i, i,
                                   "X_" + std::to_string(i + 1) + " depends on indices outside A_" +
                                       std::to_string(i + 1)});
  }
  for (Index i = 0; i < n; ++i)
    for (Index j : sys.neighborhood(i)) {
      if (j == i) continue;
      const IndexSet out = complement(n, sys.pair_cover(i, j));
      if (!out.empty() && !factorizes(law, {i, j}, out))
        report.violations.push_back({Violation::Kind::LD2Dependence, i, j,
                                     "{X_" + std::to_string(i + 1) + ", X_" + std::to_string(j + 1) +
                                         "} depends on indices outside their pair neighborhood"});
    }
  return report;
}

namespace {

class Draws {
public:
  Draws(std::uint64_t seed, std::uint64_t index) : gen_(derive_key(seed, 0x72616e64ULL), index) {}
  double uniform() { return gen_.uniform(); }
  std::size_t below(std::size_t k) { return std::min(k - 1, static_cast<std::size_t>(uniform() * k)); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  IndexSet subset(std::size_t n, std::size_t size) {
    std::vector<Index> all(n);
    for (Index i = 0; i < n; ++i) all[i] = i;
    for (std::size_t t = 0; t < size; ++t) std::swap(all[t], all[t + below(n - t)]);
    all.resize(size);
    return make_index_set(all);
  }

private:
  SlotGenerator gen_;
};

} // namespace

RandomInstance make_random_instance(std::uint64_t seed, std::uint64_t index, std::size_t max_n) {
  if (max_n < 2) throw Error(ErrorCode::InvalidSize, "need max_n >= 2");
  for (std::uint64_t attempt = 0;; ++attempt) {
    Draws d(seed, index * 64 + attempt);
    const std::size_t n = d.between(2, max_n);
    const std::size_t ns = d.between(std::max<std::size_t>(2, n / 2), std::min<std::size_t>(n + 1, 10));
    std::vector<SourceDist> sources;
    for (std::size_t s = 0; s < ns; ++s)
      sources.push_back(d.uniform() < 0.5 ? rademacher() : SourceDist{DiscreteDist({-1.0, 0.0, 2.0}, {0.25, 0.5, 0.25})});
    std::vector<std::vector<Index>> supports(n);
    auto weights = std::make_shared<std::vector<std::vector<double>>>(n);
    auto rho = std::make_shared<std::vector<double>>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const IndexSet supp = d.subset(ns, d.between(1, std::min<std::size_t>(3, ns)));
      supports[i].assign(supp.begin(), supp.end());
      for (std::size_t t = 0; t < supp.size(); ++t) (*weights)[i].push_back(0.5 + d.uniform());
      (*rho)[i] = d.uniform() < 0.5 ? 0.0 : 0.5;
    }
    Evaluator eval = [weights, rho](Index i, std::span<const double> u) {
      double v = 0.0, prod = 1.0;
      for (std::size_t t = 0; t < u.size(); ++t) {
        v += (*weights)[i][t] * u[t];
        prod *= u[t];
      }
      return v + (*rho)[i] * prod;
    };
    RandomInstance r;
    r.field = std::make_shared<LatentSourceField>(std::move(sources), std::move(supports), std::move(eval));
    r.field->center_exact();
    r.field->metadata().family = "random_latent";
    r.sys = induced_neighborhoods(*r.field);
    r.a = d.subset(n, d.between(1, std::min<std::size_t>(3, n)));
    r.b_set = d.subset(n, d.between(1, std::min<std::size_t>(3, n)));
    r.lo = -1.5 + 3.0 * d.uniform();
    r.hi = d.uniform() < 0.2 ? r.lo : r.lo + d.uniform();
    r.c = 1.0 + 2.0 * d.uniform();
    const Index at = r.a[d.below(r.a.size())];
    switch (d.below(5)) {
    case 0: r.xi = xi_constant(0.5 + d.uniform()); break;
    case 1: r.xi = {XiFunction::Kind::Abs, 1.0, at}; break;
    case 2: r.xi = {XiFunction::Kind::Square, 1.0, at}; break;
    case 3: r.xi = {XiFunction::Kind::AbsProduct, 1.0, at}; break;
    default: r.xi = {XiFunction::Kind::ClippedExp, 2.0, at}; break;
    }
    static constexpr double kPowers[] = {0.0, 1.0, 4.0 / 3.0, 2.0};
    r.p = kPowers[d.below(4)];
    const ExactLaw law = exact_law(*r.field, kDefaultEnumerationCap);
    if (law_variance(law) > 1e-6 || attempt > 32) return r;
  }
}

} // namespace locdep
