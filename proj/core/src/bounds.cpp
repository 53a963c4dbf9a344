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

#include "locdep/bounds.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "locdep/error.hpp"

namespace locdep {

double BoundReport::term(const std::string& name) const {
  for (const auto& t : terms)
    if (t.name == name) return t.value;
  throw Error(ErrorCode::InvalidArgument, "bound report has no term '" + name + "'");
}

double ConcentrationDeltas::sum() const noexcept { return std::accumulate(delta.begin(), delta.end(), 0.0); }
double SelfNormalizedConcentrationDeltas::sum() const noexcept { return std::accumulate(delta.begin(), delta.end(), 0.0); }

namespace {

void require_sigma(const MomentTable& t) {
  if (!(t.sigma2 > 0.0) || !std::isfinite(t.sigma2))
    throw Error(ErrorCode::DegenerateVariance, "bound needs sigma > 0");
}

// Summary sums every closed-form shape depends on, with first-order SEs.
struct NormSums {
  double s2 = 0, s3 = 0, s4 = 0, sigma2 = 0;  // sum l2^2, sum l4^3, sum l4^4
  double se2 = 0, se3 = 0, se4 = 0, se_sigma2 = 0;
  bool has_se = false;
};

NormSums norm_sums(const MomentTable& t, const std::vector<double>& l2, const std::vector<double>& l4) {
  NormSums s;
  s.sigma2 = t.sigma2;
  s.se_sigma2 = t.sigma2_se;
  const bool se = t.se2.size() == l2.size() && t.se4.size() == l4.size();
  for (std::size_t i = 0; i < l2.size(); ++i) {
    s.s2 += l2[i] * l2[i];
    if (se) s.se2 += std::pow(2.0 * l2[i] * t.se2[i], 2);
  }
  for (std::size_t i = 0; i < l4.size(); ++i) {
    const double a = l4[i];
    s.s3 += a * a * a;
    s.s4 += a * a * a * a;
    if (se) {
      s.se3 += std::pow(3.0 * a * a * t.se4[i], 2);
      s.se4 += std::pow(4.0 * a * a * a * t.se4[i], 2);
    }
  }
  s.se2 = std::sqrt(s.se2), s.se3 = std::sqrt(s.se3), s.se4 = std::sqrt(s.se4);
  s.has_se = s.se2 > 0 || s.se3 > 0 || s.se4 > 0 || s.se_sigma2 > 0;
  return s;
}

NormSums norm_sums(const MomentTable& t) { return norm_sums(t, t.l2, t.l4); }

using ShapeFn = std::function<double(double s2, double s3, double s4, double sigma2)>;

double propagate(const NormSums& s, const ShapeFn& f) {
  if (!s.has_se) return 0.0;
  const double base = f(s.s2, s.s3, s.s4, s.sigma2);
  auto partial = [&](int which, double se) {
    if (se <= 0.0) return 0.0;
    double v[4] = {s.s2, s.s3, s.s4, s.sigma2};
    const double h = 1e-6 * std::max(std::abs(v[which]), se);
    v[which] += h;
    return (f(v[0], v[1], v[2], v[3]) - base) / h * se;
  };
  const double d2 = partial(0, s.se2), d3 = partial(1, s.se3), d4 = partial(2, s.se4), ds = partial(3, s.se_sigma2);
  return std::sqrt(d2 * d2 + d3 * d3 + d4 * d4 + ds * ds);
}

BoundReport make_report(std::string theorem, std::vector<BoundTerm> terms) {
  BoundReport r;
  r.theorem = std::move(theorem);
  r.terms = std::move(terms);
  for (const auto& t : r.terms) r.value += t.value;
  return r;
}

void add_common_inputs(BoundReport& r, const MomentTable& t) {
  r.inputs["n"] = static_cast<double>(t.size());
  r.inputs["sigma"] = t.sigma();
  r.inputs["sigma2"] = t.sigma2;
}

class Budget {
public:
  explicit Budget(std::uint64_t limit) : limit_(limit) {}
  void spend(std::uint64_t visits) {
    used_ += visits;
    if (used_ > limit_)
      throw Error(ErrorCode::ComplexityCapExceeded,
                  "nested sums exceed the term-visit budget of " + std::to_string(limit_));
  }

private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

double sum_over(const std::vector<double>& a, const IndexSet& s) {
  double v = 0.0;
  for (Index k : s) v += a[k];
  return v;
}

// Unnormalized nested sums shared by the general bound and the concentration deltas.
struct NestedSums {
  double q1 = 0, q2 = 0, q3 = 0;
  double r1 = 0, r2 = 0, r3 = 0, r4 = 0;
};

NestedSums nested_sums(const std::vector<double>& a, const NeighborhoodSystem& sys,
                       const DerivedNeighborhoods& derived, bool third_includes_aj, Budget& budget) {
  if (!derived.interference_listed)
    throw Error(ErrorCode::MissingPairCover, "nested sums need explicit pair covers and interference sets");
  const std::size_t n = sys.size();
  std::vector<double> an_sum(n), n_sum(n), d_sum(n);
  for (Index k = 0; k < n; ++k) {
    const IndexSet an = set_union(sys.neighborhood(k), derived.reverse[k]);
    budget.spend(an.size() + derived.reverse[k].size() + derived.interference[k].size());
    an_sum[k] = sum_over(a, an);
    n_sum[k] = sum_over(a, derived.reverse[k]);
    double d = 0.0;
    for (const auto& [p, q] : derived.interference[k]) d += a[p] * a[q];
    d_sum[k] = d;
  }
  NestedSums s;
  for (Index i = 0; i < n; ++i) {
    const IndexSet& ai = sys.neighborhood(i);
    const double sz = static_cast<double>(ai.size());
    const double ai3 = a[i] * a[i] * a[i];
    const IndexSet ani = set_union(ai, derived.reverse[i]);
    budget.spend(ani.size());
    for (Index j : ani) {
      s.q2 += sz * sz * ai3 * a[j];
      s.r1 += sz * sz * ai3 * a[j] * n_sum[j];
    }
    s.r3 += sz * sz * ai3 * d_sum[i];
    for (Index j : ai) {
      const IndexSet& cover = sys.pair_cover(i, j);
      budget.spend(cover.size());
      for (Index k : cover) s.q1 += a[i] * a[j] * a[k] * an_sum[k];
      const double aj3 = a[j] * a[j] * a[j];
      IndexSet u = set_union(ai, derived.reverse[j]);
      const IndexSet u7 = u;
      if (third_includes_aj) u = set_union(u, sys.neighborhood(j));
      budget.spend(u.size() + u7.size());
      for (Index k : u) s.q3 += sz * aj3 * a[k];
      for (Index k : u7) s.r2 += sz * aj3 * a[k] * n_sum[k];
      s.r4 += sz * aj3 * d_sum[j];
    }
  }
  return s;
}

double beta1_sum(const std::vector<double>& a, const NeighborhoodSystem& sys) {
  double v = 0.0;
  for (Index i = 0; i < sys.size(); ++i) {
    const IndexSet& ai = sys.neighborhood(i);
    const double sz = static_cast<double>(ai.size());
    v += sz * sz * a[i] * a[i] * a[i];
    for (Index j : ai) v += sz * a[j] * a[j] * a[j];
  }
  return v;
}

const std::vector<double>& raw_or_centered_l4(const MomentTable& t) { return t.raw_l4.empty() ? t.l4 : t.raw_l4; }
const std::vector<double>& raw_or_centered_l2(const MomentTable& t) { return t.raw_l2.empty() ? t.l2 : t.raw_l2; }

} // namespace

BoundReport bound_main(const MomentTable& table, std::size_t kappa, std::size_t tau) {
  require_sigma(table);
  const NormSums s = norm_sums(table);
  const double k = static_cast<double>(kappa), t = static_cast<double>(tau);
  auto first = [k](double, double s3, double, double sg2) { return k * k * s3 / std::pow(sg2, 1.5); };
  auto second = [k, t](double, double, double s4, double sg2) {
    return std::sqrt(k) * (k + std::sqrt(t)) * std::sqrt(s4) / sg2;
  };
  BoundReport r = make_report("main", {{"third_moment", first(0, s.s3, 0, s.sigma2)},
                                       {"fourth_moment", second(0, 0, s.s4, s.sigma2)}});
  add_common_inputs(r, table);
  r.inputs["kappa"] = k;
  r.inputs["tau"] = t;
  r.uncertainty = propagate(s, [&](double a, double b, double c, double d) { return first(a, b, c, d) + second(a, b, c, d); });
  return r;
}

BoundReport bound_self_normalized(const MomentTable& table, std::size_t kappa, std::size_t tau) {
  BoundReport base = bound_main(table, kappa, tau);
  const NormSums s = norm_sums(table);
  const double k = static_cast<double>(kappa), t = static_cast<double>(tau);
  const double lambda = k * s.s2 / s.sigma2;
  BoundReport r = make_report("self_normalized", {{"third_moment", lambda * base.term("third_moment")},
                                                  {"fourth_moment", lambda * base.term("fourth_moment")}});
  r.inputs = base.inputs;
  r.inputs["lambda"] = lambda;
  r.uncertainty = propagate(s, [k, t](double s2, double s3, double s4, double sg2) {
    const double lam = k * s2 / sg2;
    return lam * (k * k * s3 / std::pow(sg2, 1.5) + std::sqrt(k) * (k + std::sqrt(t)) * std::sqrt(s4) / sg2);
  });
  return r;
}

BoundReport bound_general_beta(const MomentTable& table, const NeighborhoodSystem& sys,
                               const DerivedNeighborhoods& derived, std::uint64_t budget) {
  require_sigma(table);
  if (table.size() != sys.size()) throw Error(ErrorCode::InvalidSize, "table and system sizes differ");
  Budget b(budget);
  const auto& a = table.l4;
  const NestedSums s = nested_sums(a, sys, derived, true, b);
  const double sg = table.sigma();
  const double beta1 = beta1_sum(a, sys) / (sg * sg * sg);
  const double beta2 = std::sqrt((s.q1 + s.q2 + s.q3) / std::pow(sg, 4));
  const double beta3 = std::sqrt((s.r1 + s.r2 + s.r3 + s.r4) / std::pow(sg, 5));
  BoundReport r = make_report("general_beta", {{"beta1", beta1}, {"beta2", beta2}, {"beta3", beta3}});
  add_common_inputs(r, table);
  r.inputs["kappa"] = static_cast<double>(derived.kappa);
  r.inputs["tau"] = static_cast<double>(derived.tau);
  return r;
}

BoundReport bound_graph(const MomentTable& table, std::size_t d) {
  require_sigma(table);
  const NormSums s = norm_sums(table);
  const double dd = static_cast<double>(d);
  auto shape = [dd](double, double s3, double s4, double sg2) {
    return dd * dd * s3 / std::pow(sg2, 1.5) + std::pow(dd, 1.5) * std::sqrt(s4 / (sg2 * sg2));
  };
  BoundReport r = make_report("graph", {{"third_moment", dd * dd * s.s3 / std::pow(s.sigma2, 1.5)},
                                        {"fourth_moment", std::pow(dd, 1.5) * std::sqrt(s.s4 / (s.sigma2 * s.sigma2))}});
  add_common_inputs(r, table);
  r.inputs["d"] = dd;
  r.inputs["lambda1"] = dd * s.s2 / s.sigma2;
  if (d == 0) r.flags.push_back("degenerate_degree");
  r.uncertainty = propagate(s, shape);
  return r;
}

BoundReport bound_graph_self_normalized(const MomentTable& table, std::size_t d) {
  BoundReport base = bound_graph(table, d);
  const double lambda1 = base.inputs.at("lambda1");
  BoundReport r = make_report("graph_self_normalized", {{"third_moment", lambda1 * base.term("third_moment")},
                                                        {"fourth_moment", lambda1 * base.term("fourth_moment")}});
  r.inputs = base.inputs;
  r.flags = base.flags;
  const double dd = static_cast<double>(d);
  r.uncertainty = propagate(norm_sums(table), [dd](double s2, double s3, double s4, double sg2) {
    return dd * s2 / sg2 * (dd * dd * s3 / std::pow(sg2, 1.5) + std::pow(dd, 1.5) * std::sqrt(s4 / (sg2 * sg2)));
  });
  return r;
}

namespace {

double block_total(const DistributedUInputs& in) {
  if (in.block_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "no blocks");
  if (!(in.sigma1 > 0.0)) throw Error(ErrorCode::DegenerateKernel, "sigma_1 must be positive");
  double total = 0.0;
  for (std::size_t nb : in.block_sizes) {
    if (nb < in.m) throw Error(ErrorCode::BlockTooSmall, "block of size " + std::to_string(nb) + " < m");
    total += static_cast<double>(nb);
  }
  return total;
}

} // namespace

BoundReport bound_distributed_u(const DistributedUInputs& in) {
  const double big_n = block_total(in);
  const double m = in.m;
  const double normalized = m / std::sqrt(big_n) * std::pow(in.kernel_l4 / in.sigma1, 3);
  double ratio_sum = 0.0;
  for (std::size_t nb : in.block_sizes) ratio_sum += static_cast<double>(nb) / (static_cast<double>(nb) - m + 1.0);
  const double correction = m * in.kernel_variance / (big_n * in.sigma1 * in.sigma1) * ratio_sum;
  BoundReport r = make_report("distributed_u", {{"normalized", normalized}, {"block_correction", correction}});
  r.inputs["N"] = big_n;
  r.inputs["n"] = big_n;
  r.inputs["m"] = m;
  r.inputs["k"] = static_cast<double>(in.block_sizes.size());
  r.inputs["sigma1"] = in.sigma1;
  r.inputs["kernel_l4"] = in.kernel_l4;
  r.inputs["kernel_variance"] = in.kernel_variance;
  r.inputs["variance_deviation"] = distributed_u_variance_deviation(in);
  return r;
}

double distributed_u_variance_deviation(const DistributedUInputs& in) {
  const double big_n = block_total(in);
  const double m = in.m;
  double v = 0.0;
  for (std::size_t nb : in.block_sizes) {
    const double ni = static_cast<double>(nb);
    v += ni * (m - 1.0) * (m - 1.0) * in.kernel_variance / (m * (ni - m + 1.0) * in.sigma1 * in.sigma1);
  }
  return v / big_n;
}

namespace {

struct ConstrainedParts {
  double first, second, scale, sigma_fd;
  NormSums sums;
};

ConstrainedParts constrained_parts(const MomentTable& table, std::size_t n, std::size_t b,
                                   std::optional<double> sigma_fd) {
  if (n == 0 || b == 0) throw Error(ErrorCode::InvalidArgument, "need n >= 1 and b >= 1");
  const double nn = static_cast<double>(n), bb = static_cast<double>(b);
  double sfd;
  if (sigma_fd) {
    sfd = *sigma_fd;
  } else {
    require_sigma(table);
    sfd = table.sigma() / std::pow(nn, bb - 0.5);
  }
  if (!(sfd > 0.0)) throw Error(ErrorCode::DegenerateVariance, "sigma_fd must be positive");
  ConstrainedParts p;
  p.sums = norm_sums(table, raw_or_centered_l2(table), raw_or_centered_l4(table));
  p.sigma_fd = sfd;
  p.first = std::pow(nn, -bb - 0.5) * p.sums.s3 / (sfd * sfd * sfd);
  p.second = std::pow(nn, -bb / 2.0 - 0.5) * std::sqrt(p.sums.s4) / (sfd * sfd);
  p.scale = std::pow(nn, -bb) * p.sums.s2 / (sfd * sfd);
  return p;
}

} // namespace

BoundReport bound_constrained_u(const MomentTable& table, std::size_t n, std::size_t b,
                                std::optional<double> sigma_fd) {
  const ConstrainedParts p = constrained_parts(table, n, b, sigma_fd);
  BoundReport r = make_report("constrained_u", {{"third_moment", p.first}, {"fourth_moment", p.second}});
  r.inputs["n"] = static_cast<double>(n);
  r.inputs["b"] = static_cast<double>(b);
  r.inputs["tuples"] = static_cast<double>(table.size());
  r.inputs["sigma_fd"] = p.sigma_fd;
  r.inputs["self_normalized_scale"] = p.scale;
  if (!sigma_fd) {
    const double nn = static_cast<double>(n), bb = static_cast<double>(b);
    r.uncertainty = propagate(p.sums, [nn, bb](double, double s3, double s4, double sg2) {
      const double sfd = std::sqrt(sg2) / std::pow(nn, bb - 0.5);
      return std::pow(nn, -bb - 0.5) * s3 / (sfd * sfd * sfd) + std::pow(nn, -bb / 2.0 - 0.5) * std::sqrt(s4) / (sfd * sfd);
    });
  }
  return r;
}

BoundReport bound_constrained_u_self_normalized(const MomentTable& table, std::size_t n, std::size_t b,
                                                std::optional<double> sigma_fd) {
  const ConstrainedParts p = constrained_parts(table, n, b, sigma_fd);
  BoundReport r = make_report("constrained_u_self_normalized",
                              {{"third_moment", p.scale * p.first}, {"fourth_moment", p.scale * p.second}});
  r.inputs["n"] = static_cast<double>(n);
  r.inputs["b"] = static_cast<double>(b);
  r.inputs["tuples"] = static_cast<double>(table.size());
  r.inputs["sigma_fd"] = p.sigma_fd;
  r.inputs["self_normalized_scale"] = p.scale;
  return r;
}

namespace {

struct DecoratedParts {
  double first, second, lambda2;
  NormSums sums;
  double s3_cubes;  // sum E|eta|^3 (third absolute moments, not fourth norms)
};

DecoratedParts decorated_parts(const MomentTable& table, std::size_t n, std::size_t v) {
  require_sigma(table);
  if (n == 0 || v == 0) throw Error(ErrorCode::InvalidArgument, "need n >= 1 and v >= 1");
  DecoratedParts p;
  p.sums = norm_sums(table);
  p.s3_cubes = 0.0;
  for (double l3 : table.l3) p.s3_cubes += l3 * l3 * l3;
  const double nn = static_cast<double>(n), vv = static_cast<double>(v);
  const double sg2 = table.sigma2;
  p.first = std::pow(nn, 2.0 * vv - 4.0) * p.s3_cubes / std::pow(sg2, 1.5);
  p.second = std::sqrt(std::pow(nn, 3.0 * vv - 6.0) * p.sums.s4 / (sg2 * sg2));
  p.lambda2 = std::pow(nn, vv - 2.0) * p.sums.s2 / sg2;
  return p;
}

} // namespace

BoundReport bound_decorated(const MomentTable& table, std::size_t n, std::size_t v) {
  const DecoratedParts p = decorated_parts(table, n, v);
  BoundReport r = make_report("decorated", {{"third_moment", p.first}, {"fourth_moment", p.second}});
  add_common_inputs(r, table);
  r.inputs["n"] = static_cast<double>(n);
  r.inputs["v"] = static_cast<double>(v);
  r.inputs["injections"] = static_cast<double>(table.size());
  r.inputs["lambda2"] = p.lambda2;
  return r;
}

BoundReport bound_decorated_self_normalized(const MomentTable& table, std::size_t n, std::size_t v) {
  const DecoratedParts p = decorated_parts(table, n, v);
  BoundReport r = make_report("decorated_self_normalized",
                              {{"third_moment", p.lambda2 * p.first}, {"fourth_moment", p.lambda2 * p.second}});
  add_common_inputs(r, table);
  r.inputs["n"] = static_cast<double>(n);
  r.inputs["v"] = static_cast<double>(v);
  r.inputs["injections"] = static_cast<double>(table.size());
  r.inputs["lambda2"] = p.lambda2;
  return r;
}

BoundReport bound_distributed_general(const std::vector<MomentTable>& blocks, const std::vector<std::size_t>& kappa,
                                      const std::vector<std::size_t>& tau) {
  if (blocks.empty() || blocks.size() != kappa.size() || blocks.size() != tau.size())
    throw Error(ErrorCode::InvalidSize, "need one kappa and tau per block");
  double sigma2 = 0.0, third = 0.0, fourth = 0.0, n = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const double k = static_cast<double>(kappa[b]), t = static_cast<double>(tau[b]);
    sigma2 += blocks[b].sigma2;
    n += static_cast<double>(blocks[b].size());
    for (double a : blocks[b].l4) {
      third += k * k * a * a * a;
      fourth += (k * k * k + k * t) * a * a * a * a;
    }
  }
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::DegenerateVariance, "bound needs sigma > 0");
  BoundReport r = make_report("distributed_general", {{"third_moment", third / std::pow(sigma2, 1.5)},
                                                      {"fourth_moment", std::sqrt(fourth) / sigma2}});
  r.inputs["n"] = n;
  r.inputs["k"] = static_cast<double>(blocks.size());
  r.inputs["sigma"] = std::sqrt(sigma2);
  r.inputs["sigma2"] = sigma2;
  return r;
}

IndexSet reverse_closure(const NeighborhoodSystem& sys, const IndexSet& a) {
  IndexSet out;
  for (Index k = 0; k < sys.size(); ++k)
    if (intersects(sys.neighborhood(k), a)) out.push_back(k);
  return out;
}

std::vector<IndexPair> interference_of(const NeighborhoodSystem& sys, const IndexSet& a) {
  std::vector<IndexPair> out;
  for (Index i = 0; i < sys.size(); ++i)
    for (Index j : sys.neighborhood(i))
      if (intersects(sys.pair_cover(i, j), a)) out.emplace_back(i, j);
  return out;
}

double gamma_set(const MomentTable& table, const NeighborhoodSystem& sys, const IndexSet& a) {
  double g = 0.0;
  for (const auto& [i, j] : interference_of(sys, a)) g += table.l4[i] * table.l4[j];
  return g;
}

double gamma_full(const MomentTable& table, const NeighborhoodSystem& sys, const DerivedNeighborhoods& derived,
                  std::uint64_t budget) {
  Budget b(budget);
  return nested_sums(table.l4, sys, derived, false, b).q1;
}

ConcentrationDeltas concentration_deltas(const MomentTable& table, const NeighborhoodSystem& sys,
                                   const DerivedNeighborhoods& derived, const IndexSet& a, const IndexSet& b_set,
                                   double lo, double hi, double c, std::uint64_t budget) {
  require_sigma(table);
  if (a.empty() || b_set.empty()) throw Error(ErrorCode::EmptyIndexSet, "A and B must be nonempty");
  if (lo > hi || c < 1.0) throw Error(ErrorCode::InvalidArgument, "need a <= b and c >= 1");
  const auto& x = table.l4;
  const double sg = table.sigma();
  Budget bud(budget);
  ConcentrationDeltas d;
  d.delta[0] = (hi - lo) / 100.0;
  d.delta[1] = c / sg * sum_over(x, reverse_closure(sys, a));
  d.delta[2] = c / sg * sum_over(x, b_set);
  double d3 = 0.0;
  for (Index m : b_set) d3 += x[m] * sum_over(x, derived.reverse[m]);
  d.delta[3] = c / (sg * sg) * d3;
  d.delta[4] = c / (sg * sg) * gamma_set(table, sys, a);
  d.delta[5] = c / (sg * sg * sg) * beta1_sum(x, sys);
  const NestedSums s = nested_sums(x, sys, derived, false, bud);
  d.delta[6] = std::sqrt(c * c * (s.q1 + s.q2 + s.q3) / std::pow(sg, 4));
  d.delta[7] = std::sqrt(c * c * (s.r1 + s.r2 + s.r3 + s.r4) / std::pow(sg, 5));
  return d;
}

SelfNormalizedConcentrationDeltas self_normalized_concentration_deltas(const MomentTable& table, const NeighborhoodSystem& sys,
                                   const DerivedNeighborhoods& derived, const IndexSet& a, const IndexSet& b_set,
                                   double lo, double hi, double c) {
  require_sigma(table);
  if (a.empty() || b_set.empty()) throw Error(ErrorCode::EmptyIndexSet, "A and B must be nonempty");
  if (lo > hi || c < 1.0) throw Error(ErrorCode::InvalidArgument, "need a <= b and c >= 1");
  const auto& x = table.l4;
  const double sg = table.sigma();
  const double k = static_cast<double>(derived.kappa), t = static_cast<double>(derived.tau);
  const double sz = static_cast<double>(a.size());
  double s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double v : table.l2) s2 += v * v;
  for (double v : x) s3 += v * v * v, s4 += v * v * v * v;
  SelfNormalizedConcentrationDeltas d;
  d.lambda = k * s2 / (sg * sg);
  d.delta[0] = (hi - lo) / 1500.0;
  d.delta[1] = c / sg * sum_over(x, b_set);
  d.delta[2] = c * d.lambda * k * k * sz * sz / (sg * sg * sg) * s3;
  d.delta[3] = c * d.lambda * std::sqrt(k) * (k + std::sqrt(t)) * std::sqrt(sz) / (sg * sg) * std::sqrt(s4);
  double d4 = 0.0;
  for (Index kk : reverse_closure(sys, a))
    d4 += x[kk] * sum_over(x, set_union(derived.reverse[kk], sys.neighborhood(kk)));
  d.delta[4] = std::sqrt(d.lambda * d.lambda * c * c / (sg * sg) * d4);
  return d;
}

} // namespace locdep
