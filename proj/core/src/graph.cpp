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

#include "locdep/graph.hpp"

#include <algorithm>
#include <bit>

#include "locdep/error.hpp"

namespace locdep {

SimpleGraph::SimpleGraph(std::uint32_t n) : n_(n), words_((n + 63) / 64), rows_(std::size_t{n} * words_, 0) {}

SimpleGraph::SimpleGraph(std::uint32_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges)
    : SimpleGraph(n) {
  for (auto [u, v] : edges) add_edge(u, v);
}

void SimpleGraph::add_edge(std::uint32_t u, std::uint32_t v) {
  if (u >= n_ || v >= n_) throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
  if (u == v) throw Error(ErrorCode::InvalidArgument, "simple graphs have no loops");
  if (has_edge(u, v)) return;
  rows_[u * words_ + (v >> 6)] |= std::uint64_t{1} << (v & 63);
  rows_[v * words_ + (u >> 6)] |= std::uint64_t{1} << (u & 63);
  ++edges_;
}

std::uint32_t SimpleGraph::degree(std::uint32_t u) const noexcept {
  std::uint32_t d = 0;
  for (std::size_t w = 0; w < words_; ++w) d += static_cast<std::uint32_t>(std::popcount(rows_[u * words_ + w]));
  return d;
}

std::uint32_t SimpleGraph::max_degree() const noexcept {
  std::uint32_t d = 0;
  for (std::uint32_t u = 0; u < n_; ++u) d = std::max(d, degree(u));
  return d;
}

std::vector<std::uint32_t> SimpleGraph::neighbors(std::uint32_t u) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < n_; ++v)
    if (has_edge(u, v)) out.push_back(v);
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> SimpleGraph::edges() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t v = 0; v < n_; ++v)
    for (std::uint32_t u = 0; u < v; ++u)
      if (has_edge(u, v)) out.emplace_back(u, v);
  return out;
}

SimpleGraph complete_graph(std::uint32_t n) {
  SimpleGraph g(n);
  for (std::uint32_t v = 0; v < n; ++v)
    for (std::uint32_t u = 0; u < v; ++u) g.add_edge(u, v);
  return g;
}

SimpleGraph cycle_graph(std::uint32_t n) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "cycle needs at least 3 vertices");
  SimpleGraph g(n);
  for (std::uint32_t v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
  return g;
}

SimpleGraph path_graph(std::uint32_t n) {
  SimpleGraph g(n);
  for (std::uint32_t v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
  return g;
}

SimpleGraph star_graph(std::uint32_t leaves) {
  SimpleGraph g(leaves + 1);
  for (std::uint32_t v = 1; v <= leaves; ++v) g.add_edge(0, v);
  return g;
}

SimpleGraph graph_from_edge_indicators(std::uint32_t n, std::span<const double> indicators) {
  if (indicators.size() != std::size_t{n} * (n - 1) / 2)
    throw Error(ErrorCode::InvalidSize, "edge indicator count must be n(n-1)/2");
  SimpleGraph g(n);
  std::size_t k = 0;
  for (std::uint32_t b = 1; b < n; ++b)
    for (std::uint32_t a = 0; a < b; ++a, ++k)
      if (indicators[k] != 0.0) g.add_edge(a, b);
  return g;
}

namespace {

struct HomSearch {
  const SimpleGraph& f;
  const SimpleGraph& g;
  std::vector<std::uint32_t> order;                  // pattern vertices, connected-first
  std::vector<std::vector<std::uint32_t>> back;      // earlier neighbors in order
  std::vector<std::uint32_t> image;
  std::vector<std::uint64_t> used;
  std::vector<std::uint64_t> cand;
  std::uint64_t count = 0;

  HomSearch(const SimpleGraph& pattern, const SimpleGraph& host) : f(pattern), g(host) {
    const std::uint32_t v = f.vertex_count();
    std::vector<bool> placed(v, false);
    // greedy order: next vertex with most already-placed neighbors
    for (std::uint32_t step = 0; step < v; ++step) {
      std::uint32_t best = v;
      int best_score = -1;
      for (std::uint32_t u = 0; u < v; ++u) {
        if (placed[u]) continue;
        int score = 0;
        for (std::uint32_t w : order) score += f.has_edge(u, w) ? 1 : 0;
        score = score * 1024 + static_cast<int>(f.degree(u));
        if (score > best_score) best_score = score, best = u;
      }
      placed[best] = true;
      order.push_back(best);
    }
    back.resize(v);
    for (std::uint32_t t = 0; t < v; ++t)
      for (std::uint32_t s = 0; s < t; ++s)
        if (f.has_edge(order[t], order[s])) back[t].push_back(s);
    image.assign(v, 0);
    used.assign(g.words(), 0);
    cand.assign(g.words() * (v + 1), 0);
  }

  void recurse(std::uint32_t t) {
    if (t == order.size()) {
      ++count;
      return;
    }
    const std::size_t w = g.words();
    std::uint64_t* c = cand.data() + t * w;
    for (std::size_t k = 0; k < w; ++k) c[k] = ~used[k];
    const std::uint32_t n = g.vertex_count();
    if (n % 64 != 0) c[w - 1] &= (std::uint64_t{1} << (n % 64)) - 1;
    for (std::uint32_t s : back[t]) {
      const std::uint64_t* r = g.row(image[s]);
      for (std::size_t k = 0; k < w; ++k) c[k] &= r[k];
    }
    for (std::size_t k = 0; k < w; ++k) {
      std::uint64_t bits = c[k];
      while (bits) {
        const auto x = static_cast<std::uint32_t>(k * 64 + std::countr_zero(bits));
        bits &= bits - 1;
        image[t] = x;
        used[x >> 6] |= std::uint64_t{1} << (x & 63);
        recurse(t + 1);
        used[x >> 6] &= ~(std::uint64_t{1} << (x & 63));
      }
    }
  }
};

} // namespace

std::uint64_t injective_homomorphism_count(const SimpleGraph& pattern, const SimpleGraph& host) {
  if (pattern.vertex_count() > host.vertex_count()) return 0;
  if (pattern.vertex_count() == 0) return 1;
  HomSearch search(pattern, host);
  search.recurse(0);
  return search.count;
}

std::uint64_t automorphism_count(const SimpleGraph& graph) {
  // injective self-maps preserving edges are bijections that preserve the
  // (finite) edge set, hence automorphisms
  return injective_homomorphism_count(graph, graph);
}

} // namespace locdep
