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

#include "locdep/neighborhood.hpp"

#include <algorithm>
#include <iterator>

#include "locdep/error.hpp"

namespace locdep {

IndexSet make_index_set(std::vector<Index> raw) {
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  return raw;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool contains(const IndexSet& set, Index value) noexcept {
  return std::binary_search(set.begin(), set.end(), value);
}

bool intersects(const IndexSet& a, const IndexSet& b) noexcept {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib) ++ia; else ++ib;
  }
  return false;
}

bool is_subset(const IndexSet& small, const IndexSet& large) noexcept {
  return std::includes(large.begin(), large.end(), small.begin(), small.end());
}

NeighborhoodSystem::NeighborhoodSystem(std::vector<IndexSet> neighborhoods) : a_(std::move(neighborhoods)) {
  for (auto& s : a_) s = make_index_set(std::move(s));
  a2_.resize(a_.size());
  for (std::size_t i = 0; i < a_.size(); ++i) a2_[i].resize(a_[i].size());
}

NeighborhoodSystem::NeighborhoodSystem(std::vector<IndexSet> neighborhoods,
                                       std::vector<std::vector<std::optional<IndexSet>>> pair_covers)
    : NeighborhoodSystem(std::move(neighborhoods)) {
  if (pair_covers.size() != a_.size())
    throw Error(ErrorCode::InvalidArgument, "pair cover table must have one row per index");
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (pair_covers[i].size() != a_[i].size())
      throw Error(ErrorCode::InvalidArgument, "pair cover row must align with A_i");
    for (std::size_t p = 0; p < a_[i].size(); ++p) {
      if (pair_covers[i][p]) a2_[i][p] = make_index_set(std::move(*pair_covers[i][p]));
    }
  }
}

NeighborhoodSystem NeighborhoodSystem::with_default_cover(std::vector<IndexSet> neighborhoods) {
  NeighborhoodSystem sys(std::move(neighborhoods));
  const auto covers = default_pair_cover(sys.a_);
  for (std::size_t i = 0; i < sys.a_.size(); ++i)
    for (std::size_t p = 0; p < sys.a_[i].size(); ++p) sys.a2_[i][p] = covers[i][p];
  return sys;
}

NeighborhoodSystem NeighborhoodSystem::with_implicit_default_cover(std::vector<IndexSet> neighborhoods) {
  NeighborhoodSystem sys(std::move(neighborhoods));
  sys.implicit_cover_ = true;
  return sys;
}

const IndexSet* NeighborhoodSystem::find_pair_cover(Index i, Index j) const noexcept {
  if (i >= a_.size()) return nullptr;
  const auto& ai = a_[i];
  auto it = std::lower_bound(ai.begin(), ai.end(), j);
  if (it == ai.end() || *it != j) return nullptr;
  const auto& entry = a2_[i][static_cast<std::size_t>(it - ai.begin())];
  return entry ? &*entry : nullptr;
}

const IndexSet& NeighborhoodSystem::pair_cover(Index i, Index j) const {
  if (i >= a_.size() || !contains(a_[i], j))
    throw Error(ErrorCode::InvalidArgument, "pair (" + std::to_string(i) + "," + std::to_string(j) +
                                                ") is not a neighborhood pair");
  const IndexSet* cover = find_pair_cover(i, j);
  if (cover == nullptr)
    throw Error(ErrorCode::MissingPairCover,
                "no A_ij for (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")" +
                    (implicit_cover_ ? ", the system keeps its default covers implicit" : ""));
  return *cover;
}

void NeighborhoodSystem::set_pair_cover(Index i, Index j, IndexSet cover) {
  if (i >= a_.size()) throw Error(ErrorCode::InvalidArgument, "index out of range");
  const auto& ai = a_[i];
  auto it = std::lower_bound(ai.begin(), ai.end(), j);
  if (it == ai.end() || *it != j) throw Error(ErrorCode::InvalidArgument, "j is not in A_i");
  a2_[i][static_cast<std::size_t>(it - ai.begin())] = make_index_set(std::move(cover));
}

bool NeighborhoodSystem::pair_covers_complete() const noexcept {
  if (implicit_cover_) return true;
  for (const auto& row : a2_)
    for (const auto& entry : row)
      if (!entry) return false;
  return true;
}

PairCovers default_pair_cover(std::span<const IndexSet> neighborhoods) {
  PairCovers covers(neighborhoods.size());
  for (std::size_t i = 0; i < neighborhoods.size(); ++i) {
    covers[i].reserve(neighborhoods[i].size());
    for (Index j : neighborhoods[i]) {
      if (j < neighborhoods.size())
        covers[i].push_back(set_union(neighborhoods[i], neighborhoods[j]));
      else
        covers[i].push_back(neighborhoods[i]);
    }
  }
  return covers;
}

std::vector<IndexSet> reverse_neighborhoods(const NeighborhoodSystem& sys) {
  std::vector<IndexSet> reverse(sys.size());
  for (Index k = 0; k < sys.size(); ++k)
    for (Index i : sys.neighborhood(k))
      if (i < sys.size()) reverse[i].push_back(k);
  // k ascends, so each N_i is already sorted
  return reverse;
}

std::vector<std::vector<IndexPair>> pair_interference(const NeighborhoodSystem& sys) {
  std::vector<std::vector<IndexPair>> d(sys.size());
  for (Index k = 0; k < sys.size(); ++k) {
    const auto& ak = sys.neighborhood(k);
    for (std::size_t p = 0; p < ak.size(); ++p) {
      const auto& cover = sys.pair_cover_at(k, p);
      if (!cover)
        throw Error(ErrorCode::MissingPairCover,
                    "no A_kl for (" + std::to_string(k + 1) + "," + std::to_string(ak[p] + 1) + ")");
      for (Index i : *cover)
        if (i < sys.size()) d[i].emplace_back(k, ak[p]);
    }
  }
  return d;
}

KappaTau kappa_tau(const DerivedNeighborhoods& derived, const NeighborhoodSystem& sys) {
  KappaTau kt;
  for (const auto& n : derived.reverse) kt.kappa = std::max(kt.kappa, n.size());
  for (Index i = 0; i < sys.size(); ++i)
    for (std::size_t p = 0; p < sys.neighborhood(i).size(); ++p)
      if (const auto& cover = sys.pair_cover_at(i, p)) kt.kappa = std::max(kt.kappa, cover->size());
  for (const auto& d : derived.interference) kt.tau = std::max(kt.tau, d.size());
  return kt;
}

KappaTau default_cover_kappa_tau(std::span<const IndexSet> neighborhoods, std::span<const IndexSet> reverse) {
  const std::size_t n = neighborhoods.size();
  KappaTau kt;
  for (const auto& r : reverse) kt.kappa = std::max(kt.kappa, r.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& ak = neighborhoods[k];
    for (Index l : ak) {
      if (l >= n) {
        kt.kappa = std::max(kt.kappa, ak.size());
        continue;
      }
      const auto& al = neighborhoods[l];
      std::size_t common = 0;
      auto x = ak.begin();
      auto y = al.begin();
      while (x != ak.end() && y != al.end()) {
        if (*x == *y) ++common, ++x, ++y;
        else if (*x < *y) ++x;
        else ++y;
      }
      kt.kappa = std::max(kt.kappa, ak.size() + al.size() - common);
    }
  }
  // |D_i| = #{(k, l) : l in A_k, i in A_k or i in A_l}
  std::vector<char> in_reverse(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t d = 0;
    for (Index k : reverse[i]) {
      in_reverse[k] = 1;
      d += neighborhoods[k].size();
    }
    for (Index l : reverse[i])
      for (Index k : reverse[l])
        if (!in_reverse[k]) ++d;
    for (Index k : reverse[i]) in_reverse[k] = 0;
    kt.tau = std::max(kt.tau, d);
  }
  return kt;
}

DerivedNeighborhoods derive(const NeighborhoodSystem& sys) {
  DerivedNeighborhoods derived;
  derived.reverse = reverse_neighborhoods(sys);
  if (sys.implicit_default_cover()) {
    const auto kt = default_cover_kappa_tau(sys.neighborhoods(), derived.reverse);
    derived.kappa = kt.kappa;
    derived.tau = kt.tau;
    derived.interference_listed = false;
    return derived;
  }
  derived.interference = pair_interference(sys);
  const auto kt = kappa_tau(derived, sys);
  derived.kappa = kt.kappa;
  derived.tau = kt.tau;
  return derived;
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
  case Violation::Kind::IndexOutOfRange: return "index_out_of_range";
  case Violation::Kind::NotReflexive: return "not_reflexive";
  case Violation::Kind::EmptyNeighborhood: return "empty_neighborhood";
  case Violation::Kind::PairCoverMissing: return "pair_cover_missing";
  case Violation::Kind::PairCoverNotContaining: return "pair_cover_not_containing";
  case Violation::Kind::PairCoverLacksPartner: return "pair_cover_lacks_partner";
  case Violation::Kind::LD1Dependence: return "ld1_dependence";
  case Violation::Kind::LD2Dependence: return "ld2_dependence";
  }
  return "unknown";
}

namespace {

std::string pair_label(Index i, Index j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

} // namespace

ValidationReport validate_structure(const NeighborhoodSystem& sys) {
  ValidationReport report;
  const auto n = static_cast<Index>(sys.size());
  auto violate = [&](Violation::Kind kind, Index i, Index j, std::string msg) {
    report.violations.push_back({kind, i, j, std::move(msg)});
  };

  for (Index i = 0; i < n; ++i) {
    const auto& ai = sys.neighborhood(i);
    if (ai.empty()) violate(Violation::Kind::EmptyNeighborhood, i, i, "A_" + std::to_string(i + 1) + " is empty");
    for (Index j : ai)
      if (j >= n)
        violate(Violation::Kind::IndexOutOfRange, i, j,
                "A_" + std::to_string(i + 1) + " contains " + std::to_string(j + 1) + " > n");
    if (!contains(ai, i))
      violate(Violation::Kind::NotReflexive, i, i, std::to_string(i + 1) + " is not in its own A_i");

    if (sys.implicit_default_cover()) continue;
    for (std::size_t p = 0; p < ai.size(); ++p) {
      const Index j = ai[p];
      const auto& cover = sys.pair_cover_at(i, p);
      if (!cover) {
        violate(Violation::Kind::PairCoverMissing, i, j, "A_ij missing for " + pair_label(i, j));
        continue;
      }
      for (Index k : *cover)
        if (k >= n)
          violate(Violation::Kind::IndexOutOfRange, i, j,
                  "A_ij for " + pair_label(i, j) + " contains " + std::to_string(k + 1) + " > n");
      if (!is_subset(ai, *cover))
        violate(Violation::Kind::PairCoverNotContaining, i, j, "A_ij for " + pair_label(i, j) + " does not contain A_i");
      if (!contains(*cover, j)) {
        report.warnings.push_back(
            {Violation::Kind::PairCoverLacksPartner, i, j, "A_ij for " + pair_label(i, j) + " does not contain j"});
      } else if (j < n && !is_subset(sys.neighborhood(j), *cover)) {
        report.warnings.push_back(
            {Violation::Kind::PairCoverLacksPartner, i, j, "A_ij for " + pair_label(i, j) + " does not contain A_j"});
      }
    }
  }
  return report;
}

NeighborhoodSystem relabel(const NeighborhoodSystem& sys, std::span<const Index> perm) {
  if (perm.size() != sys.size()) throw Error(ErrorCode::InvalidArgument, "permutation size mismatch");
  auto map_set = [&](const IndexSet& s) {
    IndexSet out;
    out.reserve(s.size());
    for (Index v : s) out.push_back(perm[v]);
    return make_index_set(std::move(out));
  };
  const std::size_t n = sys.size();
  std::vector<IndexSet> a(n);
  for (Index i = 0; i < n; ++i) a[perm[i]] = map_set(sys.neighborhood(i));
  if (sys.implicit_default_cover()) {
    auto out = NeighborhoodSystem::with_implicit_default_cover(std::move(a));
    out.mark_independence_verified(sys.independence_verified());
    return out;
  }
  NeighborhoodSystem out(std::move(a));
  for (Index i = 0; i < n; ++i) {
    const auto& ai = sys.neighborhood(i);
    for (std::size_t p = 0; p < ai.size(); ++p)
      if (const auto& cover = sys.pair_cover_at(i, p)) out.set_pair_cover(perm[i], perm[ai[p]], map_set(*cover));
  }
  out.mark_independence_verified(sys.independence_verified());
  return out;
}

} // namespace locdep
