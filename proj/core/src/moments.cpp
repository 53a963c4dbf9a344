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

#include "locdep/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "locdep/error.hpp"
#include "locdep/rng.hpp"

namespace locdep {

std::string to_string(MomentMode mode) {
  switch (mode) {
  case MomentMode::Exact: return "exact";
  case MomentMode::ExactLocal: return "exact_local";
  case MomentMode::Symmetric: return "symmetric";
  case MomentMode::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

double MomentTable::sigma() const { return sigma2 > 0.0 ? std::sqrt(sigma2) : 0.0; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void finish_table(MomentTable& t) {
  const std::size_t n = t.l2.size();
  if (t.se2.empty()) t.se2.assign(n, 0.0);
  if (t.se3.empty()) t.se3.assign(n, 0.0);
  if (t.se4.empty()) t.se4.assign(n, 0.0);
  t.degenerate = !(t.sigma2 > 0.0);
  if (t.degenerate || t.kappa == 0) {
    t.lambda = kNaN;
    return;
  }
  double s2 = 0.0;
  for (double v : t.l2) s2 += v * v;
  t.lambda = static_cast<double>(t.kappa) * s2 / t.sigma2;
}

double root(double m, double p) { return m > 0.0 ? std::pow(m, 1.0 / p) : 0.0; }

struct Abs {
  double p2 = 0, p3 = 0, p4 = 0;
  void add(double prob, double x) {
    const double a = std::abs(x);
    const double a2 = a * a;
    p2 += prob * a2;
    p3 += prob * a2 * a;
    p4 += prob * a2 * a2;
  }
};

void store_norms(MomentTable& t, std::size_t i, const Abs& a) {
  t.l2[i] = root(a.p2, 2.0);
  t.l3[i] = root(a.p3, 3.0);
  t.l4[i] = root(a.p4, 4.0);
}

void resize_norms(MomentTable& t, std::size_t n) {
  t.l2.assign(n, 0.0);
  t.l3.assign(n, 0.0);
  t.l4.assign(n, 0.0);
}

struct LocalNorms {
  Abs centered;
  Abs raw;
  double mean = 0.0;  // of the centered value
};

LocalNorms local_norms(const LatentSourceField& field, Index i, std::uint64_t cap) {
  LocalNorms out;
  const double mu = field.mean_of(i);
  enumerate_sources(field, field.support(i), cap, [&](double p, std::span<const double> v) {
    const double raw = field.raw_from_support(i, v);
    out.raw.add(p, raw);
    out.centered.add(p, raw - mu);
    out.mean += p * (raw - mu);
  });
  return out;
}

// Cov(X_i, X_j) by enumerating the union of the two supports.
double local_covariance(const LatentSourceField& field, Index i, Index j, std::uint64_t cap) {
  const auto& si = field.support(i);
  const auto& sj = field.support(j);
  std::vector<Index> uni(si.begin(), si.end());
  uni.insert(uni.end(), sj.begin(), sj.end());
  std::sort(uni.begin(), uni.end());
  uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
  auto positions = [&](const std::vector<Index>& s) {
    std::vector<std::size_t> pos(s.size());
    for (std::size_t t = 0; t < s.size(); ++t)
      pos[t] = static_cast<std::size_t>(std::lower_bound(uni.begin(), uni.end(), s[t]) - uni.begin());
    return pos;
  };
  const auto pi = positions(si);
  const auto pj = positions(sj);
  std::vector<double> vi(si.size()), vj(sj.size());
  double exy = 0.0, ex = 0.0, ey = 0.0;
  enumerate_sources(field, uni, cap, [&](double p, std::span<const double> v) {
    for (std::size_t t = 0; t < pi.size(); ++t) vi[t] = v[pi[t]];
    for (std::size_t t = 0; t < pj.size(); ++t) vj[t] = v[pj[t]];
    const double x = field.raw_from_support(i, vi);
    const double y = field.raw_from_support(j, vj);
    exy += p * x * y;
    ex += p * x;
    ey += p * y;
  });
  return exy - ex * ey;
}

} // namespace

MomentTable exact_moment_table(const ExactLaw& law, const NeighborhoodSystem& sys) {
  const std::size_t n = law.size();
  if (sys.size() != n) throw Error(ErrorCode::InvalidSize, "law and system sizes differ");
  std::vector<Abs> abs(n);
  std::vector<double> mean(n, 0.0);
  std::vector<std::vector<double>> cross(n);
  for (std::size_t i = 0; i < n; ++i) cross[i].assign(sys.neighborhood(static_cast<Index>(i)).size(), 0.0);
  double es = 0.0, es2 = 0.0;
  for (std::size_t k = 0; k < law.outcomes(); ++k) {
    const double p = law.prob(k);
    const auto x = law.row(k);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      abs[i].add(p, x[i]);
      mean[i] += p * x[i];
      s += x[i];
      const auto& a = sys.neighborhood(static_cast<Index>(i));
      for (std::size_t t = 0; t < a.size(); ++t) cross[i][t] += p * x[i] * x[a[t]];
    }
    es += p * s;
    es2 += p * s * s;
  }
  MomentTable t;
  t.mode = MomentMode::Exact;
  resize_norms(t, n);
  double identity = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    store_norms(t, i, abs[i]);
    const auto& a = sys.neighborhood(static_cast<Index>(i));
    for (std::size_t u = 0; u < a.size(); ++u) identity += cross[i][u] - mean[i] * mean[a[u]];
  }
  t.sigma2 = std::max(0.0, es2 - es * es);
  t.sigma2_identity = identity;
  t.sigma2_provenance = "enumeration";
  t.kappa = derive(sys).kappa;
  finish_table(t);
  return t;
}

MomentTable exact_moment_table(const LatentSourceField& field, const NeighborhoodSystem& sys, std::uint64_t cap) {
  const ExactLaw law = exact_law(field, cap);
  MomentTable t = exact_moment_table(law, sys);
  if (field.centering() != Centering::None) {
    std::vector<Abs> raw(field.size());
    for (std::size_t k = 0; k < law.outcomes(); ++k) {
      const auto x = law.row(k);
      for (std::size_t i = 0; i < field.size(); ++i) raw[i].add(law.prob(k), x[i] + field.mean_of(static_cast<Index>(i)));
    }
    for (const auto& r : raw) {
      t.raw_l2.push_back(root(r.p2, 2.0));
      t.raw_l4.push_back(root(r.p4, 4.0));
    }
  }
  return t;
}

MomentTable local_moment_table(const LatentSourceField& field, const NeighborhoodSystem& sys, std::uint64_t cap) {
  const std::size_t n = field.size();
  if (sys.size() != n) throw Error(ErrorCode::InvalidSize, "field and system sizes differ");
  MomentTable t;
  t.mode = MomentMode::ExactLocal;
  resize_norms(t, n);
  const bool centered = field.centering() != Centering::None;
  double identity = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ln = local_norms(field, static_cast<Index>(i), cap);
    store_norms(t, i, ln.centered);
    if (centered) {
      t.raw_l2.push_back(root(ln.raw.p2, 2.0));
      t.raw_l4.push_back(root(ln.raw.p4, 4.0));
    }
    for (Index j : sys.neighborhood(static_cast<Index>(i)))
      identity += local_covariance(field, static_cast<Index>(i), j, cap);
  }
  t.sigma2 = std::max(0.0, identity);
  t.sigma2_identity = identity;
  t.sigma2_provenance = "covariance_identity";
  t.kappa = derive(sys).kappa;
  finish_table(t);
  return t;
}

MomentTable symmetric_moment_table(const LatentSourceField& field, Index representative, std::size_t kappa,
                                   std::uint64_t cap) {
  const std::size_t n = field.size();
  if (representative >= n) throw Error(ErrorCode::InvalidArgument, "representative index out of range");
  const auto ln = local_norms(field, representative, cap);
  MomentTable t;
  t.mode = MomentMode::Symmetric;
  t.l2.assign(n, root(ln.centered.p2, 2.0));
  t.l3.assign(n, root(ln.centered.p3, 3.0));
  t.l4.assign(n, root(ln.centered.p4, 4.0));
  if (field.centering() != Centering::None) {
    t.raw_l2.assign(n, root(ln.raw.p2, 2.0));
    t.raw_l4.assign(n, root(ln.raw.p4, 4.0));
  }
  double cov = 0.0;
  for (Index j : induced_neighborhood_of(field, representative))
    cov += local_covariance(field, representative, j, cap);
  t.sigma2 = std::max(0.0, static_cast<double>(n) * cov);
  t.sigma2_identity = t.sigma2;
  t.sigma2_provenance = "symmetric_covariance_identity";
  t.kappa = kappa;
  finish_table(t);
  return t;
}

MomentTable mc_moment_table(const LatentSourceField& field, const NeighborhoodSystem& sys, std::uint64_t reps,
                            std::uint64_t seed, unsigned batches, unsigned threads) {
  if (reps < 1000) throw Error(ErrorCode::InvalidArgument, "Monte-Carlo moment table needs reps >= 1000");
  if (batches < 2 || batches > reps) throw Error(ErrorCode::InvalidArgument, "need 2 <= batches <= reps");
  const std::size_t n = field.size();
  if (sys.size() != n) throw Error(ErrorCode::InvalidSize, "field and system sizes differ");

  struct Batch {
    std::uint64_t count = 0;
    std::vector<double> p2, p3, p4;
    double s = 0.0, s2 = 0.0;
  };
  std::vector<Batch> acc(batches);
  const std::uint64_t base = reps / batches;
  const std::uint64_t extra = reps % batches;
  const std::uint64_t key = field.stream_key(seed);
  parallel_chunks(batches, threads, [&](std::size_t b) {
    Batch& bt = acc[b];
    bt.count = base + (b < extra ? 1 : 0);
    const std::uint64_t first = b * base + std::min<std::uint64_t>(b, extra);
    bt.p2.assign(n, 0.0), bt.p3.assign(n, 0.0), bt.p4.assign(n, 0.0);
    std::vector<double> src(field.source_count()), x(n);
    for (std::uint64_t r = first; r < first + bt.count; ++r) {
      field.draw_sources(ReplicationStream(key, r), src);
      field.evaluate(src, x);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(x[i]);
        const double a2 = a * a;
        bt.p2[i] += a2;
        bt.p3[i] += a2 * a;
        bt.p4[i] += a2 * a2;
        s += x[i];
      }
      bt.s += s;
      bt.s2 += s * s;
    }
  });

  MomentTable t;
  t.mode = MomentMode::MonteCarlo;
  t.replications = reps;
  resize_norms(t, n);
  t.se2.assign(n, 0.0), t.se3.assign(n, 0.0), t.se4.assign(n, 0.0);
  const double nb = static_cast<double>(batches);
  auto summarize = [&](auto get, std::size_t i, double p, double& norm, double& se) {
    double total = 0.0;
    for (const auto& bt : acc) total += get(bt, i);
    const double m = total / static_cast<double>(reps);
    double var = 0.0;
    for (const auto& bt : acc) {
      const double d = get(bt, i) / static_cast<double>(bt.count) - m;
      var += d * d;
    }
    const double se_m = std::sqrt(var / (nb - 1.0) / nb);
    norm = root(m, p);
    // delta method for m^{1/p}
    se = m > 0.0 ? se_m * std::pow(m, 1.0 / p - 1.0) / p : 0.0;
  };
  for (std::size_t i = 0; i < n; ++i) {
    summarize([](const Batch& bt, std::size_t k) { return bt.p2[k]; }, i, 2.0, t.l2[i], t.se2[i]);
    summarize([](const Batch& bt, std::size_t k) { return bt.p3[k]; }, i, 3.0, t.l3[i], t.se3[i]);
    summarize([](const Batch& bt, std::size_t k) { return bt.p4[k]; }, i, 4.0, t.l4[i], t.se4[i]);
  }
  double s = 0.0, s2 = 0.0;
  for (const auto& bt : acc) s += bt.s, s2 += bt.s2;
  const double rr = static_cast<double>(reps);
  const double mean_s = s / rr;
  t.sigma2 = std::max(0.0, (s2 - rr * mean_s * mean_s) / (rr - 1.0));
  double var_b = 0.0;
  for (const auto& bt : acc) {
    const double c = static_cast<double>(bt.count);
    const double mb = bt.s / c;
    const double vb = (bt.s2 - c * mb * mb) / (c - 1.0);
    var_b += (vb - t.sigma2) * (vb - t.sigma2);
  }
  t.sigma2_se = std::sqrt(var_b / (nb - 1.0) / nb);
  t.sigma2_provenance = "sample_variance";
  t.kappa = derive(sys).kappa;
  finish_table(t);
  return t;
}

void set_analytic_variance(MomentTable& table, double sigma2, const std::string& provenance) {
  table.sigma2 = sigma2;
  table.sigma2_se = 0.0;
  table.sigma2_provenance = provenance;
  finish_table(table);
}

HoeffdingProjection hoeffding_sigma1(const Kernel& h, unsigned m, const SourceDist& dist, std::uint64_t reps,
                                     std::uint64_t seed, double tol) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "kernel degree must be >= 1");
  if (!h) throw Error(ErrorCode::InvalidArgument, "kernel missing");
  HoeffdingProjection out;
  std::vector<double> x(m);
  if (const auto* d = std::get_if<DiscreteDist>(&dist)) {
    const std::size_t a = d->size();
    std::vector<double> cond(a, 0.0);  // E[h | X_1 = value a]
    double eh = 0.0, eh2 = 0.0, eh4 = 0.0;
    std::vector<std::size_t> digit(m, 0);
    for (;;) {
      double p = 1.0;
      for (unsigned t = 0; t < m; ++t) {
        x[t] = d->values()[digit[t]];
        p *= d->probs()[digit[t]];
      }
      const double v = h(x);
      eh += p * v;
      eh2 += p * v * v;
      eh4 += p * v * v * v * v;
      // conditional weight: probability of the remaining m-1 coordinates
      const double p1 = d->probs()[digit[0]];
      if (p1 > 0.0) cond[digit[0]] += p / p1 * v;
      unsigned t = m;
      while (t > 0 && ++digit[t - 1] == a) digit[--t] = 0;
      if (t == 0) break;
    }
    double s1 = 0.0;
    for (std::size_t k = 0; k < a; ++k) {
      const double g = cond[k] - eh;
      s1 += d->probs()[k] * g * g;
    }
    out.theta = eh;
    out.kernel_variance = std::max(0.0, eh2 - eh * eh);
    out.kernel_l4 = root(eh4, 4.0);
    out.sigma1 = std::sqrt(s1);
    out.exact = true;
  } else {
    if (reps < 100) throw Error(ErrorCode::InvalidArgument, "nested Monte Carlo needs reps >= 100");
    const std::uint64_t key = derive_key(seed, 0x686f65666664ULL);
    const std::uint64_t plain = std::max<std::uint64_t>(reps * 50, 200000);
    long double eh = 0, eh2 = 0, eh4 = 0;
    for (std::uint64_t r = 0; r < plain; ++r) {
      ReplicationStream s(key, r);
      for (unsigned t = 0; t < m; ++t) x[t] = draw(dist, s.uniforms(t));
      const long double v = h(x);
      eh += v, eh2 += v * v, eh4 += v * v * v * v;
    }
    eh /= plain, eh2 /= plain, eh4 /= plain;
    const std::uint64_t inner = 256;
    const std::uint64_t key2 = derive_key(seed, 0x696e6e6572ULL);
    long double prod = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
      ReplicationStream s(key2, r);
      const double x1 = draw(dist, s.uniforms(0));
      long double ga = 0, gb = 0;
      for (std::uint64_t k = 0; k < 2 * inner; ++k) {
        x[0] = x1;
        for (unsigned t = 1; t < m; ++t) x[t] = draw(dist, s.uniforms(1 + k * m + t));
        (k < inner ? ga : gb) += h(x);
      }
      prod += (ga / inner) * (gb / inner);
    }
    const long double s1 = prod / reps - eh * eh;
    out.theta = static_cast<double>(eh);
    out.kernel_variance = static_cast<double>(std::max<long double>(0, eh2 - eh * eh));
    out.kernel_l4 = root(static_cast<double>(eh4), 4.0);
    out.sigma1 = s1 > 0 ? std::sqrt(static_cast<double>(s1)) : 0.0;
    out.exact = false;
  }
  if (out.sigma1 * out.sigma1 <= tol * std::max(1.0, out.kernel_variance))
    throw Error(ErrorCode::DegenerateKernel, "Hoeffding projection vanishes (sigma_1 ~ 0); degenerate kernel");
  return out;
}

} // namespace locdep
