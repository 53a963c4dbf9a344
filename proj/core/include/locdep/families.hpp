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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locdep/distribution.hpp"
#include "locdep/field.hpp"
#include "locdep/graph.hpp"

namespace locdep {

/// Function of a window of consecutive sources (m-dependent sequences).
struct WindowFunction {
  enum class Kind { Sum, Product, Custom };
  Kind kind = Kind::Sum;
  std::function<double(std::span<const double>)> custom;

  double operator()(std::span<const double> w) const;
  static WindowFunction sum() { return {}; }
  static WindowFunction product() { return {Kind::Product, {}}; }
};

/// X_i = window(U_i, ..., U_{i+m}) over n + m i.i.d. sources, centered.
LatentSourceField build_m_dependent(std::size_t n, std::size_t m, SourceDist dist,
                                    WindowFunction window = WindowFunction::sum());
LatentSourceField build_iid(std::size_t n, SourceDist dist);

/// X_v = f(vertex source of v, sources of the edges at v). Edge sources make
/// the supports of adjacent vertices overlap, so A_v is the closed
/// neighborhood of v. Default f is the plain sum. Edge sources follow the
/// vertex sources in SimpleGraph::edges() order.
using VertexFunction = std::function<double(std::span<const double> own_then_edges)>;
LatentSourceField build_graph_dependency(const SimpleGraph& graph, SourceDist dist, VertexFunction f = {});

using Kernel = std::function<double(std::span<const double>)>;

/// Distributed U-statistic field. Sources are the N sample points, block b
/// holding n_b consecutive ones. One index per (block, m-subset in colex
/// order) with X = n_b / (N C(n_b, m)) (h - theta), so sum X = U_d - theta.
/// theta is computed exactly for discrete sources, by a 10^6-draw pre-pass
/// otherwise, unless supplied.
LatentSourceField build_ustat_field(std::vector<std::size_t> block_sizes, unsigned m, Kernel h, SourceDist dist,
                                    std::optional<double> theta = std::nullopt);

/// Gap constraint D = (d_1..d_{l-1}); nullopt encodes an infinite gap.
using GapConstraint = std::vector<std::optional<std::size_t>>;
/// b(D) = 1 + #{k : d_k infinite}.
std::size_t gap_b(const GapConstraint& gaps);
/// Increasing tuples (0-based) satisfying i_{j+1} - i_j <= d_j, or == d_j for
/// finite gaps when exact_gaps is set. Throws InvalidSize past `cap`.
std::vector<std::vector<std::uint32_t>> admissible_tuples(std::size_t n, const GapConstraint& gaps, bool exact_gaps,
                                                          std::uint64_t cap = std::uint64_t{1} << 24);

struct ConstrainedUSpec {
  std::size_t n = 0;
  std::size_t m = 0;  // dependence range of the underlying sequence
  GapConstraint gaps;
  bool exact_gaps = false;
  Kernel f;  // function of the l tuple values
  SourceDist dist = rademacher();
  WindowFunction window = WindowFunction::sum();
  std::uint64_t cap = std::uint64_t{1} << 24;
};

/// Constrained U-statistic field over the m-dependent sequence
/// Z_t = window(U_t..U_{t+m}); one index per admissible tuple, centered.
/// Metadata records b, l, |I|.
LatentSourceField build_constrained_ustat_field(const ConstrainedUSpec& spec);

/// Word occurrences of w (letters as integer codes) in an i.i.d. string with
/// the given letter probabilities.
LatentSourceField build_word_field(std::size_t n, std::vector<double> letter_probs, std::vector<int> word,
                                   GapConstraint gaps, bool exact_gaps = false);
/// Pattern occurrences of tau (a permutation of 1..l) in a uniform random
/// permutation, generated as ranks of i.i.d. Uniform(0,1) sources.
LatentSourceField build_pattern_field(std::size_t n, std::vector<int> tau, GapConstraint gaps,
                                      bool exact_gaps = false);

using EdgeKernel = std::function<double(double decoration, double edge_value)>;

struct DecoratedSpec {
  std::uint32_t n = 0;
  SimpleGraph pattern;
  std::vector<double> decoration;  // f(uv) per pattern edge, in pattern.edges() order
  EdgeKernel h;
  SourceDist edge_dist = bernoulli(0.5);
  std::uint64_t cap = std::uint64_t{1} << 22;
};

/// Decorated injective homomorphism sum. Sources are the C(n,2) edge
/// variables in colex pair order; one index per injection V(F) -> [n]
/// (mixed-radix order) with X_phi = prod_uv h(f(uv), g(phi(u), phi(v))),
/// centered. Throws GraphTooLarge when the injection count exceeds cap.
LatentSourceField build_decorated_graph_field(const DecoratedSpec& spec);

/// Subgraph counts in G(n, p): h(x, y) = x y, f = 1, Bernoulli(p) edges.
/// Attaches a source sum computed by backtracking on the sampled host graph.
LatentSourceField build_subgraph_count_field(std::uint32_t n, const SimpleGraph& pattern, double p,
                                             std::uint64_t cap = std::uint64_t{1} << 22);

/// Closed-form Var of the triangle count in G(n, p).
double triangle_count_variance(std::uint32_t n, double p);

} // namespace locdep
