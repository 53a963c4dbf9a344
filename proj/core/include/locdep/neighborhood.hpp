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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace locdep {

using Index = std::uint32_t;
/// Sorted, duplicate-free list of 0-based indices.
using IndexSet = std::vector<Index>;
using IndexPair = std::pair<Index, Index>;

IndexSet make_index_set(std::vector<Index> raw);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
bool contains(const IndexSet& set, Index value) noexcept;
bool intersects(const IndexSet& a, const IndexSet& b) noexcept;
bool is_subset(const IndexSet& small, const IndexSet& large) noexcept;

/// Dependence skeleton: a neighborhood A_i for every index and, for every
/// j in A_i, a pair neighborhood A_ij. Pair neighborhoods are stored
/// explicitly, aligned with the positions of A_i, so that a family can supply
/// covers tighter than A_i u A_j.
class NeighborhoodSystem {
public:
  NeighborhoodSystem() = default;
  explicit NeighborhoodSystem(std::vector<IndexSet> neighborhoods);
  NeighborhoodSystem(std::vector<IndexSet> neighborhoods,
                     std::vector<std::vector<std::optional<IndexSet>>> pair_covers);

  /// A_ij = A_i u A_j for every j in A_i.
  static NeighborhoodSystem with_default_cover(std::vector<IndexSet> neighborhoods);
  /// Same covers, left implicit: nothing per pair is stored, pair_cover()
  /// throws MissingPairCover, and derive() computes kappa and tau by counting.
  static NeighborhoodSystem with_implicit_default_cover(std::vector<IndexSet> neighborhoods);
  bool implicit_default_cover() const noexcept { return implicit_cover_; }

  std::size_t size() const noexcept { return a_.size(); }
  const IndexSet& neighborhood(Index i) const { return a_.at(i); }
  const std::vector<IndexSet>& neighborhoods() const noexcept { return a_; }

  const std::optional<IndexSet>& pair_cover_at(Index i, std::size_t pos) const {
    return a2_.at(i).at(pos);
  }
  /// nullptr when j is not in A_i or the entry is absent.
  const IndexSet* find_pair_cover(Index i, Index j) const noexcept;
  /// Throws MissingPairCover when absent, InvalidArgument when j is not in A_i.
  const IndexSet& pair_cover(Index i, Index j) const;
  void set_pair_cover(Index i, Index j, IndexSet cover);
  bool pair_covers_complete() const noexcept;

  /// True when the system was induced from latent supports, i.e. (LD1)/(LD2)
  /// hold by construction. User-declared systems stay unverified.
  bool independence_verified() const noexcept { return verified_; }
  void mark_independence_verified(bool verified) noexcept { verified_ = verified; }

private:
  std::vector<IndexSet> a_;
  std::vector<std::vector<std::optional<IndexSet>>> a2_;
  bool verified_ = false;
  bool implicit_cover_ = false;
};

using PairCovers = std::vector<std::vector<IndexSet>>;

/// A_ij = A_i u A_j, aligned with the positions of each A_i.
PairCovers default_pair_cover(std::span<const IndexSet> neighborhoods);

/// N_i = {k : i in A_k}.
std::vector<IndexSet> reverse_neighborhoods(const NeighborhoodSystem& sys);

/// D_i = {(k, l) : l in A_k, i in A_kl}, pairs listed in (k, l) order.
std::vector<std::vector<IndexPair>> pair_interference(const NeighborhoodSystem& sys);

struct KappaTau {
  std::size_t kappa = 0;
  std::size_t tau = 0;
};

struct DerivedNeighborhoods {
  std::vector<IndexSet> reverse;                       // N_i
  std::vector<std::vector<IndexPair>> interference;    // D_i
  std::size_t kappa = 0;
  std::size_t tau = 0;
  /// False for implicit covers, where `interference` is left empty.
  bool interference_listed = true;
};

KappaTau kappa_tau(const DerivedNeighborhoods& derived, const NeighborhoodSystem& sys);
DerivedNeighborhoods derive(const NeighborhoodSystem& sys);
/// kappa and tau under A_ij = A_i u A_j, counted without listing any D_i.
KappaTau default_cover_kappa_tau(std::span<const IndexSet> neighborhoods, std::span<const IndexSet> reverse);

struct Violation {
  enum class Kind {
    IndexOutOfRange,
    NotReflexive,
    EmptyNeighborhood,
    PairCoverMissing,
    PairCoverNotContaining,
    PairCoverLacksPartner,
    LD1Dependence,  // X_i not independent of the indices outside A_i
    LD2Dependence,  // {X_i, X_j} not independent of the indices outside A_ij
  };
  Kind kind;
  Index i = 0;
  Index j = 0;
  std::string message;
};

std::string to_string(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;
  /// Non-fatal findings: j not in A_ij, or A_j not inside A_ij.
  std::vector<Violation> warnings;

  bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate_structure(const NeighborhoodSystem& sys);

/// Applies the index permutation old -> perm[old] to every set.
NeighborhoodSystem relabel(const NeighborhoodSystem& sys, std::span<const Index> perm);

/// {"n": int, "A": [[...]], "A2": [{"i","j","set"}]} with 1-based indices.
std::string to_json(const NeighborhoodSystem& sys);
NeighborhoodSystem neighborhood_from_json(const std::string& text);

} // namespace locdep
