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

// Brute-force evaluators used as independent references. They follow the
// definitions literally and share no code with the library loops.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "locdep/error.hpp"
#include "locdep/moments.hpp"
#include "locdep/neighborhood.hpp"

namespace locdep::testing {

template <class Fn>
ErrorCode thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected a locdep::Error");
}

inline bool in(const IndexSet& s, Index v) {
  for (Index x : s)
    if (x == v) return true;
  return false;
}

inline std::vector<std::set<Index>> naive_reverse(const NeighborhoodSystem& sys) {
  const auto n = static_cast<Index>(sys.size());
  std::vector<std::set<Index>> out(n);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k)
      if (in(sys.neighborhood(k), i)) out[i].insert(k);
  return out;
}

inline std::vector<std::set<std::pair<Index, Index>>> naive_interference(const NeighborhoodSystem& sys) {
  const auto n = static_cast<Index>(sys.size());
  std::vector<std::set<std::pair<Index, Index>>> out(n);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k)
      for (Index l = 0; l < n; ++l)
        if (in(sys.neighborhood(k), l) && in(sys.pair_cover(k, l), i)) out[i].insert({k, l});
  return out;
}

inline std::pair<std::size_t, std::size_t> naive_kappa_tau(const NeighborhoodSystem& sys) {
  std::size_t kappa = 0, tau = 0;
  for (const auto& r : naive_reverse(sys)) kappa = std::max(kappa, r.size());
  for (Index i = 0; i < sys.size(); ++i)
    for (Index j : sys.neighborhood(i)) kappa = std::max(kappa, sys.pair_cover(i, j).size());
  for (const auto& d : naive_interference(sys)) tau = std::max(tau, d.size());
  return {kappa, tau};
}

/// (beta_1, beta_2^2, beta_3^2) straight from the nested-sum definitions.
inline std::array<double, 3> naive_beta(const std::vector<double>& x, const NeighborhoodSystem& sys, double sigma) {
  const auto n = static_cast<Index>(sys.size());
  const auto rev = naive_reverse(sys);
  const auto dset = naive_interference(sys);
  auto A = [&](Index i) { return std::set<Index>(sys.neighborhood(i).begin(), sys.neighborhood(i).end()); };
  auto unite = [](std::set<Index> a, const std::set<Index>& b) {
    a.insert(b.begin(), b.end());
    return a;
  };
  double b1 = 0, b2 = 0, b3 = 0;
  for (Index i = 0; i < n; ++i) {
    const double ai = static_cast<double>(A(i).size());
    b1 += ai * ai * std::pow(x[i], 3);
    for (Index j : A(i)) b1 += ai * std::pow(x[j], 3);

    for (Index j : A(i))
      for (Index k : sys.pair_cover(i, j))
        for (Index l : unite(A(k), rev[k])) b2 += x[i] * x[j] * x[k] * x[l];
    for (Index j : unite(A(i), rev[i])) b2 += ai * ai * std::pow(x[i], 3) * x[j];
    for (Index j : A(i))
      for (Index k : unite(unite(A(i), rev[j]), A(j))) b2 += ai * std::pow(x[j], 3) * x[k];

    for (Index j : unite(A(i), rev[i]))
      for (Index k : rev[j]) b3 += ai * ai * std::pow(x[i], 3) * x[j] * x[k];
    for (Index j : A(i))
      for (Index k : unite(A(i), rev[j]))
        for (Index l : rev[k]) b3 += ai * std::pow(x[j], 3) * x[k] * x[l];
    for (const auto& [j, k] : dset[i]) b3 += ai * ai * std::pow(x[i], 3) * x[j] * x[k];
    for (Index j : A(i))
      for (const auto& [k, l] : dset[j]) b3 += ai * std::pow(x[j], 3) * x[k] * x[l];
  }
  return {b1 / std::pow(sigma, 3), b2 / std::pow(sigma, 4), b3 / std::pow(sigma, 5)};
}

/// Random system on n indices with i in A_i. Covers are A_i u A_j with
/// `default_cover`, otherwise random supersets of A_i u {j}.
inline NeighborhoodSystem random_system(std::mt19937_64& rng, std::size_t n, bool default_cover, double density = 0.3) {
  std::bernoulli_distribution coin(density);
  std::vector<IndexSet> a(n);
  for (Index i = 0; i < n; ++i) {
    a[i].push_back(i);
    for (Index j = 0; j < n; ++j)
      if (j != i && coin(rng)) a[i].push_back(j);
    a[i] = make_index_set(a[i]);
  }
  if (default_cover) return NeighborhoodSystem::with_default_cover(a);
  NeighborhoodSystem sys(a);
  for (Index i = 0; i < n; ++i)
    for (Index j : a[i]) {
      IndexSet cover = a[i];
      cover.push_back(j);
      for (Index k = 0; k < n; ++k)
        if (coin(rng)) cover.push_back(k);
      sys.set_pair_cover(i, j, make_index_set(cover));
    }
  return sys;
}

/// Moment table with the given fourth norms; l2 = l3 = l4 unless supplied.
inline MomentTable table_from_norms(std::vector<double> l4, double sigma2, std::size_t kappa = 0) {
  MomentTable t;
  t.l2 = l4;
  t.l3 = l4;
  t.l4 = std::move(l4);
  t.se2.assign(t.l4.size(), 0.0);
  t.se3 = t.se2;
  t.se4 = t.se2;
  t.sigma2 = sigma2;
  t.kappa = kappa;
  t.lambda = std::nan("");
  return t;
}

inline std::vector<Index> random_permutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<Index> p(n);
  for (Index i = 0; i < n; ++i) p[i] = i;
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

} // namespace locdep::testing
