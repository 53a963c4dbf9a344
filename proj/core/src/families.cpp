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

#include "locdep/families.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "locdep/codec.hpp"
#include "locdep/error.hpp"

namespace locdep {

namespace {

constexpr std::uint64_t kPrepassDraws = 1000000;
constexpr std::uint64_t kPrepassSeed = 0x5eed5eedULL;

double factorial(std::size_t k) {
  double f = 1.0;
  for (std::size_t t = 2; t <= k; ++t) f *= static_cast<double>(t);
  return f;
}

// Exact means for discrete sources, otherwise the Monte-Carlo pre-pass.
void center_default(LatentSourceField& field, bool stationary) {
  if (field.enumerable())
    field.center_exact();
  else
    field.center_monte_carlo(kPrepassDraws, kPrepassSeed, stationary);
}

} // namespace

double WindowFunction::operator()(std::span<const double> w) const {
  switch (kind) {
  case Kind::Sum: {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
  }
  case Kind::Product: {
    double p = 1.0;
    for (double x : w) p *= x;
    return p;
  }
  case Kind::Custom: return custom(w);
  }
  return 0.0;
}

LatentSourceField build_m_dependent(std::size_t n, std::size_t m, SourceDist dist, WindowFunction window) {
  if (n < 1) throw Error(ErrorCode::InvalidSize, "m-dependent field needs n >= 1");
  if (window.kind == WindowFunction::Kind::Custom && !window.custom)
    throw Error(ErrorCode::InvalidArgument, "custom window function missing");
  std::vector<SourceDist> sources(n + m, dist);
  std::vector<std::vector<Index>> supports(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t <= m; ++t) supports[i].push_back(static_cast<Index>(i + t));
  LatentSourceField field(std::move(sources), std::move(supports),
                          [window](Index, std::span<const double> v) { return window(v); });
  const double mu = mean(dist);
  switch (window.kind) {
  case WindowFunction::Kind::Sum:
    field.set_means(std::vector<double>(n, static_cast<double>(m + 1) * mu), Centering::Analytic);
    break;
  case WindowFunction::Kind::Product:
    field.set_means(std::vector<double>(n, std::pow(mu, static_cast<double>(m + 1))), Centering::Analytic);
    break;
  case WindowFunction::Kind::Custom: center_default(field, true); break;
  }
  auto& meta = field.metadata();
  meta.family = m == 0 ? "iid" : "m_dependent";
  meta.params["n"] = static_cast<double>(n);
  meta.params["m"] = static_cast<double>(m);
  meta.labels["source"] = describe(dist);
  return field;
}

LatentSourceField build_iid(std::size_t n, SourceDist dist) { return build_m_dependent(n, 0, std::move(dist)); }

LatentSourceField build_graph_dependency(const SimpleGraph& graph, SourceDist dist, VertexFunction f) {
  const std::uint32_t n = graph.vertex_count();
  if (n < 1) throw Error(ErrorCode::InvalidSize, "graph dependency field needs at least one vertex");
  const auto edges = graph.edges();
  std::vector<SourceDist> sources(n + edges.size(), dist);
  std::vector<std::vector<Index>> supports(n);
  for (std::uint32_t v = 0; v < n; ++v) supports[v].push_back(v);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    supports[edges[e].first].push_back(static_cast<Index>(n + e));
    supports[edges[e].second].push_back(static_cast<Index>(n + e));
  }
  const bool plain = !f;
  LatentSourceField field(std::move(sources), std::move(supports), [f](Index, std::span<const double> v) {
    if (f) return f(v);
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  });
  if (plain) {
    std::vector<double> means(n);
    for (std::uint32_t v = 0; v < n; ++v) means[v] = static_cast<double>(1 + graph.degree(v)) * mean(dist);
    field.set_means(std::move(means), Centering::Analytic);
  } else {
    center_default(field, false);
  }
  auto& meta = field.metadata();
  meta.family = "graph";
  meta.params["n"] = n;
  meta.params["d"] = graph.max_degree();
  meta.params["edges"] = static_cast<double>(edges.size());
  meta.labels["source"] = describe(dist);
  return field;
}

LatentSourceField build_ustat_field(std::vector<std::size_t> block_sizes, unsigned m, Kernel h, SourceDist dist,
                                    std::optional<double> theta) {
  if (block_sizes.empty()) throw Error(ErrorCode::InvalidSize, "need at least one block");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "kernel degree m must be >= 1");
  if (!h) throw Error(ErrorCode::InvalidArgument, "kernel missing");
  std::size_t total = 0;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    if (block_sizes[b] < m)
      throw Error(ErrorCode::BlockTooSmall, "block " + std::to_string(b) + " has n_i = " +
                                                std::to_string(block_sizes[b]) + " < m = " + std::to_string(m));
    total += block_sizes[b];
  }
  const double big_n = static_cast<double>(total);

  const bool theta_given = theta.has_value();
  if (!theta) {
    if (const auto* d = std::get_if<DiscreteDist>(&dist)) {
      double th = 0.0;
      std::vector<std::size_t> digit(m, 0);
      std::vector<double> x(m);
      for (;;) {
        double p = 1.0;
        for (unsigned t = 0; t < m; ++t) {
          x[t] = d->values()[digit[t]];
          p *= d->probs()[digit[t]];
        }
        th += p * h(x);
        unsigned t = m;
        while (t > 0 && ++digit[t - 1] == d->size()) digit[--t] = 0;
        if (t == 0) break;
      }
      theta = th;
    } else {
      const std::uint64_t key = derive_key(kPrepassSeed, 0x7468657461ULL);
      long double acc = 0.0L;
      std::vector<double> x(m);
      for (std::uint64_t r = 0; r < kPrepassDraws; ++r) {
        ReplicationStream s(key, r);
        for (unsigned t = 0; t < m; ++t) x[t] = draw(dist, s.uniforms(t));
        acc += h(x);
      }
      theta = static_cast<double>(acc / kPrepassDraws);
    }
  }

  std::vector<std::vector<Index>> supports;
  std::vector<double> weights;
  std::vector<std::uint32_t> block_of;
  std::size_t offset = 0;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    const std::size_t nb = block_sizes[b];
    const std::uint64_t count = binom(nb, m);
    const double w = static_cast<double>(nb) / (big_n * static_cast<double>(count));
    for (std::uint64_t r = 0; r < count; ++r) {
      auto subset = colex_unrank(r, m);
      std::vector<Index> supp(m);
      for (unsigned t = 0; t < m; ++t) supp[t] = static_cast<Index>(offset + subset[t]);
      supports.push_back(std::move(supp));
      weights.push_back(w);
      block_of.push_back(static_cast<std::uint32_t>(b));
    }
    offset += nb;
  }
  auto wts = std::make_shared<const std::vector<double>>(weights);
  LatentSourceField field(std::vector<SourceDist>(total, dist), std::move(supports),
                          [wts, h](Index i, std::span<const double> v) { return (*wts)[i] * h(v); });
  std::vector<double> means(weights.size());
  for (std::size_t i = 0; i < means.size(); ++i) means[i] = weights[i] * *theta;
  field.set_means(std::move(means), theta_given          ? Centering::Supplied
                                    : is_discrete(dist) ? Centering::Exact
                                                        : Centering::MonteCarlo);
  auto& meta = field.metadata();
  meta.family = "ustat";
  meta.params["N"] = big_n;
  meta.params["n"] = big_n;
  meta.params["m"] = m;
  meta.params["k"] = static_cast<double>(block_sizes.size());
  meta.params["theta"] = *theta;
  meta.labels["source"] = describe(dist);
  meta.block_of = std::move(block_of);
  return field;
}

std::size_t gap_b(const GapConstraint& gaps) {
  std::size_t b = 1;
  for (const auto& d : gaps)
    if (!d) ++b;
  return b;
}

std::vector<std::vector<std::uint32_t>> admissible_tuples(std::size_t n, const GapConstraint& gaps, bool exact_gaps,
                                                          std::uint64_t cap) {
  for (const auto& d : gaps)
    if (d && *d == 0) throw Error(ErrorCode::InvalidArgument, "finite gaps must be >= 1");
  const std::size_t l = gaps.size() + 1;
  std::vector<std::vector<std::uint32_t>> out;
  if (l > n) return out;
  std::vector<std::uint32_t> cur(l);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == l) {
      if (out.size() >= cap)
        throw Error(ErrorCode::InvalidSize, "admissible tuple count exceeds cap " + std::to_string(cap));
      out.push_back(cur);
      return;
    }
    // room left for the remaining l - j - 1 elements
    const std::size_t hi = n - (l - j);
    if (j == 0) {
      for (std::size_t t = 0; t <= hi; ++t) {
        cur[0] = static_cast<std::uint32_t>(t);
        rec(1);
      }
      return;
    }
    const std::size_t prev = cur[j - 1];
    const auto& d = gaps[j - 1];
    std::size_t lo = prev + 1;
    std::size_t top = hi;
    if (d) {
      top = std::min(top, prev + *d);
      if (exact_gaps) lo = prev + *d;
    }
    for (std::size_t t = lo; t <= top; ++t) {
      cur[j] = static_cast<std::uint32_t>(t);
      rec(j + 1);
    }
  };
  rec(0);
  return out;
}

LatentSourceField build_constrained_ustat_field(const ConstrainedUSpec& spec) {
  if (!spec.f) throw Error(ErrorCode::InvalidArgument, "tuple function missing");
  if (spec.n < 1) throw Error(ErrorCode::InvalidSize, "sequence length must be >= 1");
  auto tuples = admissible_tuples(spec.n, spec.gaps, spec.exact_gaps, spec.cap);
  if (tuples.empty()) throw Error(ErrorCode::EmptyIndexSet, "no admissible tuple for the given constraint");
  const std::size_t l = spec.gaps.size() + 1;
  const std::size_t m = spec.m;

  std::vector<std::vector<Index>> supports(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    auto& s = supports[i];
    for (std::uint32_t t : tuples[i])
      for (std::size_t u = 0; u <= m; ++u) s.push_back(static_cast<Index>(t + u));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  auto tup = std::make_shared<const std::vector<std::vector<std::uint32_t>>>(std::move(tuples));
  auto sup = std::make_shared<const std::vector<std::vector<Index>>>(supports);
  auto f = spec.f;
  auto window = spec.window;
  Evaluator eval = [tup, sup, f, window, m, l](Index i, std::span<const double> v) {
    const auto& t = (*tup)[i];
    const auto& s = (*sup)[i];
    double z[16];
    std::vector<double> zbig;
    double* zp = z;
    if (l > 16) {
      zbig.resize(l);
      zp = zbig.data();
    }
    for (std::size_t j = 0; j < l; ++j) {
      const auto pos = static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), t[j]) - s.begin());
      zp[j] = window(v.subspan(pos, m + 1));
    }
    return f(std::span<const double>(zp, l));
  };
  LatentSourceField field(std::vector<SourceDist>(spec.n + m, spec.dist), std::move(supports), std::move(eval));
  if (field.enumerable())
    field.center_exact();
  else
    field.center_monte_carlo(kPrepassDraws, kPrepassSeed, false);
  auto& meta = field.metadata();
  meta.family = "constrained_ustat";
  meta.params["n"] = static_cast<double>(spec.n);
  meta.params["m"] = static_cast<double>(m);
  meta.params["l"] = static_cast<double>(l);
  meta.params["b"] = static_cast<double>(gap_b(spec.gaps));
  meta.params["tuples"] = static_cast<double>(tup->size());
  meta.params["exact_gaps"] = spec.exact_gaps ? 1.0 : 0.0;
  meta.labels["source"] = describe(spec.dist);
  return field;
}

LatentSourceField build_word_field(std::size_t n, std::vector<double> letter_probs, std::vector<int> word,
                                   GapConstraint gaps, bool exact_gaps) {
  if (word.empty() || gaps.size() + 1 != word.size())
    throw Error(ErrorCode::InvalidArgument, "need |D| = |w| - 1 and a nonempty word");
  std::vector<double> letters(letter_probs.size());
  for (std::size_t a = 0; a < letters.size(); ++a) letters[a] = static_cast<double>(a);
  for (int c : word)
    if (c < 0 || static_cast<std::size_t>(c) >= letters.size())
      throw Error(ErrorCode::InvalidArgument, "word letter outside the alphabet");
  ConstrainedUSpec spec;
  spec.n = n;
  spec.m = 0;
  spec.gaps = std::move(gaps);
  spec.exact_gaps = exact_gaps;
  spec.dist = DiscreteDist(letters, letter_probs);
  spec.f = [word](std::span<const double> x) {
    for (std::size_t j = 0; j < word.size(); ++j)
      if (x[j] != static_cast<double>(word[j])) return 0.0;
    return 1.0;
  };
  auto field = build_constrained_ustat_field(spec);
  field.metadata().labels["kind"] = "word";
  return field;
}

LatentSourceField build_pattern_field(std::size_t n, std::vector<int> tau, GapConstraint gaps, bool exact_gaps) {
  if (tau.empty() || gaps.size() + 1 != tau.size())
    throw Error(ErrorCode::InvalidArgument, "need |D| = |tau| - 1 and a nonempty pattern");
  const std::size_t l = tau.size();
  ConstrainedUSpec spec;
  spec.n = n;
  spec.m = 0;
  spec.gaps = gaps;
  spec.exact_gaps = exact_gaps;
  spec.dist = uniform01();
  spec.f = [tau](std::span<const double> x) {
    for (std::size_t a = 0; a < tau.size(); ++a)
      for (std::size_t b = a + 1; b < tau.size(); ++b)
        if (!((x[a] - x[b]) * static_cast<double>(tau[a] - tau[b]) > 0.0)) return 0.0;
    return 1.0;
  };
  // skip the pre-pass: i.i.d. continuous values realize each order pattern
  // with probability 1/l!
  spec.cap = std::uint64_t{1} << 24;
  auto tuples = admissible_tuples(n, gaps, exact_gaps, spec.cap);
  if (tuples.empty()) throw Error(ErrorCode::EmptyIndexSet, "no admissible tuple for the given constraint");
  std::vector<std::vector<Index>> supports(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) supports[i].assign(tuples[i].begin(), tuples[i].end());
  auto f = spec.f;
  LatentSourceField field(std::vector<SourceDist>(n, spec.dist), std::move(supports),
                          [f](Index, std::span<const double> v) { return f(v); });
  field.set_means(std::vector<double>(tuples.size(), 1.0 / factorial(l)), Centering::Analytic);
  auto& meta = field.metadata();
  meta.family = "constrained_ustat";
  meta.params["n"] = static_cast<double>(n);
  meta.params["m"] = 0;
  meta.params["l"] = static_cast<double>(l);
  meta.params["b"] = static_cast<double>(gap_b(gaps));
  meta.params["tuples"] = static_cast<double>(tuples.size());
  meta.params["exact_gaps"] = exact_gaps ? 1.0 : 0.0;
  meta.labels["kind"] = "pattern";
  meta.labels["source"] = describe(spec.dist);
  return field;
}

LatentSourceField build_decorated_graph_field(const DecoratedSpec& spec) {
  const auto& F = spec.pattern;
  const std::uint32_t v = F.vertex_count();
  const auto fedges = F.edges();
  if (fedges.empty()) throw Error(ErrorCode::InvalidArgument, "pattern graph needs at least one edge");
  if (spec.n < v) throw Error(ErrorCode::InvalidSize, "need n >= |V(F)|");
  if (!spec.h) throw Error(ErrorCode::InvalidArgument, "edge kernel missing");
  std::vector<double> deco = spec.decoration;
  if (deco.empty()) deco.assign(fedges.size(), 1.0);
  if (deco.size() != fedges.size()) throw Error(ErrorCode::InvalidSize, "one decoration per pattern edge");

  const InjectionCodec codec(spec.n, v);
  if (codec.size() > spec.cap)
    throw Error(ErrorCode::GraphTooLarge, "injection count " + std::to_string(codec.size()) + " exceeds cap " +
                                              std::to_string(spec.cap));
  std::vector<std::vector<Index>> supports(codec.size());
  for (std::uint64_t r = 0; r < codec.size(); ++r) {
    const auto phi = codec.unrank(r);
    auto& s = supports[r];
    s.reserve(fedges.size());
    for (auto [a, b] : fedges) s.push_back(static_cast<Index>(pair_index(phi[a], phi[b])));
  }
  const std::size_t pairs = std::size_t{spec.n} * (spec.n - 1) / 2;
  auto h = spec.h;
  LatentSourceField field(std::vector<SourceDist>(pairs, spec.edge_dist), std::move(supports),
                          [h, deco](Index, std::span<const double> g) {
                            double p = 1.0;
                            for (std::size_t t = 0; t < g.size(); ++t) p *= h(deco[t], g[t]);
                            return p;
                          });
  center_default(field, false);
  auto& meta = field.metadata();
  meta.family = "decorated_graph";
  meta.params["n"] = spec.n;
  meta.params["v"] = v;
  meta.params["pattern_edges"] = static_cast<double>(fedges.size());
  meta.labels["source"] = describe(spec.edge_dist);
  return field;
}

LatentSourceField build_subgraph_count_field(std::uint32_t n, const SimpleGraph& pattern, double p,
                                             std::uint64_t cap) {
  if (pattern.edge_count() == 0) throw Error(ErrorCode::InvalidArgument, "pattern graph needs at least one edge");
  if (n < pattern.vertex_count()) throw Error(ErrorCode::InvalidSize, "need n >= |V(F)|");
  const InjectionCodec codec(n, pattern.vertex_count());
  if (codec.size() > cap)
    throw Error(ErrorCode::GraphTooLarge, "injection count " + std::to_string(codec.size()) + " exceeds cap " +
                                              std::to_string(cap));
  // every injection has mean p^e, so centering needs no enumeration
  const auto pairs = std::size_t{n} * (n - 1) / 2;
  const auto fedges = pattern.edges();
  std::vector<std::vector<Index>> supports(codec.size());
  for (std::uint64_t r = 0; r < codec.size(); ++r) {
    const auto phi = codec.unrank(r);
    for (auto [a, b] : fedges) supports[r].push_back(static_cast<Index>(pair_index(phi[a], phi[b])));
  }
  LatentSourceField field(std::vector<SourceDist>(pairs, bernoulli(p)), std::move(supports),
                          [](Index, std::span<const double> g) {
                            double prod = 1.0;
                            for (double x : g) prod *= x;
                            return prod;
                          });
  field.set_means(std::vector<double>(codec.size(), std::pow(p, static_cast<double>(fedges.size()))),
                  Centering::Analytic);
  field.set_source_sum([n, pattern](std::span<const double> sources) {
    return static_cast<double>(injective_homomorphism_count(pattern, graph_from_edge_indicators(n, sources)));
  });
  auto& meta = field.metadata();
  meta.family = "decorated_graph";
  meta.params["n"] = n;
  meta.params["v"] = pattern.vertex_count();
  meta.params["pattern_edges"] = static_cast<double>(fedges.size());
  meta.params["p"] = p;
  meta.params["automorphisms"] = static_cast<double>(automorphism_count(pattern));
  meta.labels["source"] = describe(bernoulli(p));
  return field;
}

double triangle_count_variance(std::uint32_t n, double p) {
  const double triples = static_cast<double>(binom(n, 3));
  const double p3 = p * p * p;
  const double p5 = p3 * p * p;
  const double p6 = p3 * p3;
  return triples * (p3 - p6) + 3.0 * (static_cast<double>(n) - 3.0) * triples * (p5 - p6);
}

} // namespace locdep
