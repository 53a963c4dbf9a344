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
#include <span>
#include <utility>
#include <vector>

namespace locdep {

/// Undirected simple graph on vertices 0..n-1 with bitset adjacency rows.
class SimpleGraph {
public:
  SimpleGraph() = default;
  explicit SimpleGraph(std::uint32_t n);
  SimpleGraph(std::uint32_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

  std::uint32_t vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_; }

  void add_edge(std::uint32_t u, std::uint32_t v);
  bool has_edge(std::uint32_t u, std::uint32_t v) const noexcept {
    return (rows_[u * words_ + (v >> 6)] >> (v & 63)) & 1u;
  }
  std::uint32_t degree(std::uint32_t u) const noexcept;
  std::uint32_t max_degree() const noexcept;
  std::vector<std::uint32_t> neighbors(std::uint32_t u) const;
  /// Edges (u, v) with u < v, ordered by (v, u), i.e. colex pair order.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;

  const std::uint64_t* row(std::uint32_t u) const noexcept { return rows_.data() + u * words_; }
  std::size_t words() const noexcept { return words_; }

private:
  std::uint32_t n_ = 0;
  std::size_t words_ = 0;
  std::size_t edges_ = 0;
  std::vector<std::uint64_t> rows_;
};

SimpleGraph complete_graph(std::uint32_t n);
SimpleGraph cycle_graph(std::uint32_t n);
SimpleGraph path_graph(std::uint32_t n);
SimpleGraph star_graph(std::uint32_t leaves);

/// Host graph on n vertices whose edge {a, b} is present iff
/// indicators[pair_index(a, b)] != 0.
SimpleGraph graph_from_edge_indicators(std::uint32_t n, std::span<const double> indicators);

/// Number of injective maps phi: V(F) -> V(G) with phi(u)phi(v) in E(G)
/// for every uv in E(F). Backtracking over the vertices of F.
std::uint64_t injective_homomorphism_count(const SimpleGraph& pattern, const SimpleGraph& host);
std::uint64_t automorphism_count(const SimpleGraph& graph);

} // namespace locdep
