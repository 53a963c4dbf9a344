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

#include "locdep/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "locdep/codec.hpp"
#include "locdep/error.hpp"

namespace locdep {

std::string to_string(Statistic s) {
  switch (s) {
  case Statistic::W1: return "w1";
  case Statistic::W2: return "w2";
  case Statistic::W2bar: return "w2bar";
  }
  return "unknown";
}

Statistic parse_statistic(const std::string& name) {
  if (name == "w1") return Statistic::W1;
  if (name == "w2") return Statistic::W2;
  if (name == "w2bar") return Statistic::W2bar;
  throw Error(ErrorCode::InvalidArgument, "unknown statistic '" + name + "' (expected w1, w2 or w2bar)");
}

double pairwise_sum(std::span<const double> x) noexcept {
  if (x.size() <= 16) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

SumW1 sum_and_w1(std::span<const double> x, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::DegenerateVariance, "sigma must be positive");
  const double s = pairwise_sum(x);
  return {s, s / sigma};
}

std::vector<double> neighborhood_sums(std::span<const double> x, const NeighborhoodSystem& sys) {
  if (x.size() != sys.size()) throw Error(ErrorCode::InvalidSize, "realization and system sizes differ");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (Index j : sys.neighborhood(static_cast<Index>(i))) s += x[j];
    y[i] = s;
  }
  return y;
}

namespace {

struct Products {
  double s;
  double sum_xy;
  double sum_y;
};

Products products(std::span<const double> x, const NeighborhoodSystem& sys) {
  const auto y = neighborhood_sums(x, sys);
  std::vector<double> xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xy[i] = x[i] * y[i];
  return {pairwise_sum(x), pairwise_sum(xy), pairwise_sum(y)};
}

SelfNormalized finish_w2(const Products& p, std::size_t n) {
  const double nn = static_cast<double>(n);
  // sum_i (X_i Y_i - Xbar Ybar) = sum X_i Y_i - S * sum Y / n
  const double cross = p.s * p.sum_y / nn;
  const double inner = p.sum_xy - cross;
  // cancellation residue counts as V = 0
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(p.sum_xy) + std::abs(cross));
  SelfNormalized out;
  out.v = inner > noise ? std::sqrt(inner) : 0.0;
  if (out.v > 0.0) out.w2 = p.s / out.v;
  return out;
}

} // namespace

SelfNormalized self_normalized_w2(std::span<const double> x, const NeighborhoodSystem& sys) {
  return finish_w2(products(x, sys), x.size());
}

double psi_clamp(double x, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::DegenerateVariance, "sigma must be positive");
  const double s2 = sigma * sigma;
  return std::sqrt(std::min(std::max(x, s2 / 4.0), 2.0 * s2));
}

Clamped clamped_w2bar(std::span<const double> x, const NeighborhoodSystem& sys, double sigma) {
  const auto p = products(x, sys);
  const double vbar = psi_clamp(p.sum_xy, sigma);
  return {vbar, p.s / vbar};
}

StatisticValue evaluate_statistics(std::span<const double> x, const NeighborhoodSystem& sys, double sigma) {
  const auto p = products(x, sys);
  StatisticValue out;
  out.s = p.s;
  const auto sn = finish_w2(p, x.size());
  out.v = sn.v;
  out.w2 = sn.w2;
  if (sigma > 0.0) {
    out.w1 = p.s / sigma;
    out.vbar = psi_clamp(p.sum_xy, sigma);
    out.w2bar = p.s / out.vbar;
  }
  return out;
}

namespace {

// Generic gap-constrained tuple walk; `accept(j, idx, chosen)` decides
// whether position idx may take slot j given the earlier choices.
std::uint64_t count_tuples(std::size_t n, std::size_t l, const GapConstraint& gaps, bool exact_gaps,
                           const std::function<bool(std::size_t, std::size_t, const std::vector<std::size_t>&)>& accept) {
  if (l == 0 || l > n) return 0;
  if (gaps.size() + 1 != l) throw Error(ErrorCode::InvalidArgument, "need |D| = l - 1");
  std::vector<std::size_t> chosen(l);
  std::uint64_t count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == l) {
      ++count;
      return;
    }
    std::size_t lo = 0;
    std::size_t hi = n - 1;
    if (j > 0) {
      lo = chosen[j - 1] + 1;
      if (const auto& d = gaps[j - 1]) {
        hi = std::min(hi, chosen[j - 1] + *d);
        if (exact_gaps) lo = chosen[j - 1] + *d;
      }
    }
    for (std::size_t t = lo; t <= hi && t < n; ++t) {
      if (!accept(j, t, chosen)) continue;
      chosen[j] = t;
      rec(j + 1);
    }
  };
  rec(0);
  return count;
}

} // namespace

std::uint64_t count_word_occurrences(std::span<const int> s, std::span<const int> w, const GapConstraint& gaps,
                                     bool exact_gaps) {
  if (w.empty() || w.size() > s.size()) return 0;
  return count_tuples(s.size(), w.size(), gaps, exact_gaps,
                      [&](std::size_t j, std::size_t t, const std::vector<std::size_t>&) { return s[t] == w[j]; });
}

std::uint64_t count_pattern_occurrences(std::span<const int> pi, std::span<const int> tau, const GapConstraint& gaps,
                                        bool exact_gaps) {
  if (tau.empty() || tau.size() > pi.size()) return 0;
  return count_tuples(pi.size(), tau.size(), gaps, exact_gaps,
                      [&](std::size_t j, std::size_t t, const std::vector<std::size_t>& chosen) {
                        for (std::size_t k = 0; k < j; ++k)
                          if ((pi[chosen[k]] < pi[t]) != (tau[k] < tau[j])) return false;
                        return true;
                      });
}

SubgraphCount subgraph_statistic(const SimpleGraph& host, const SimpleGraph& pattern, std::uint64_t cap) {
  if (pattern.edge_count() == 0) throw Error(ErrorCode::InvalidArgument, "pattern graph needs at least one edge");
  SubgraphCount out;
  out.automorphisms = automorphism_count(pattern);
  if (pattern.vertex_count() > host.vertex_count()) return out;
  const InjectionCodec codec(host.vertex_count(), pattern.vertex_count());
  if (codec.size() > cap)
    throw Error(ErrorCode::GraphTooLarge, "injection count " + std::to_string(codec.size()) + " exceeds cap");
  out.injective_homomorphisms = injective_homomorphism_count(pattern, host);
  if (out.injective_homomorphisms % out.automorphisms != 0)
    throw Error(ErrorCode::InvalidArgument, "homomorphism count not divisible by |Aut(F)|");
  out.copies = out.injective_homomorphisms / out.automorphisms;
  return out;
}

namespace {

double block_ustat(std::span<const double> data, unsigned m, const Kernel& h) {
  const std::uint64_t count = binom(data.size(), m);
  std::vector<double> vals(count);
  std::vector<double> x(m);
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto sub = colex_unrank(r, m);
    for (unsigned t = 0; t < m; ++t) x[t] = data[sub[t]];
    vals[r] = h(x);
  }
  return pairwise_sum(vals) / static_cast<double>(count);
}

} // namespace

double classical_ustat(std::span<const double> data, unsigned m, const Kernel& h) {
  if (m < 1 || data.size() < m) throw Error(ErrorCode::BlockTooSmall, "need N >= m >= 1");
  return block_ustat(data, m, h);
}

double distributed_ustat(std::span<const double> data, std::span<const std::size_t> block_sizes, unsigned m,
                         const Kernel& h) {
  std::size_t total = 0;
  for (std::size_t nb : block_sizes) {
    if (nb < m) throw Error(ErrorCode::BlockTooSmall, "block smaller than m");
    total += nb;
  }
  if (total != data.size()) throw Error(ErrorCode::InvalidSize, "block sizes must add up to the data length");
  double acc = 0.0;
  std::size_t offset = 0;
  for (std::size_t nb : block_sizes) {
    acc += static_cast<double>(nb) * block_ustat(data.subspan(offset, nb), m, h);
    offset += nb;
  }
  return acc / static_cast<double>(total);
}

} // namespace locdep
