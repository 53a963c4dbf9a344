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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "locdep/distribution.hpp"
#include "locdep/neighborhood.hpp"
#include "locdep/rng.hpp"

namespace locdep {

/// X_i as a function of the values of its supporting sources, listed in the
/// order of support(i).
using Evaluator = std::function<double(Index i, std::span<const double> support_values)>;
/// Uncentered sum of all X_i from the full source vector; families with huge
/// index sets (subgraph counts) provide one so sampling skips per-index work.
using SourceSum = std::function<double(std::span<const double> sources)>;

enum class Centering { None, Exact, Analytic, MonteCarlo, Supplied };
std::string to_string(Centering c);

struct FieldMetadata {
  std::string family;
  std::map<std::string, double> params;
  std::map<std::string, std::string> labels;
  /// Block id per field index (distributed U-statistics); empty otherwise.
  std::vector<std::uint32_t> block_of;
  std::uint64_t mean_draws = 0;
};

struct Realization {
  std::vector<double> values;
  std::vector<double> sources;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
};

/// Field {X_i} built from independent sources. Dependence is entirely
/// carried by the supports: X_i and X_j can only be dependent when their
/// supports share a source.
class LatentSourceField {
public:
  LatentSourceField(std::vector<SourceDist> sources, std::vector<std::vector<Index>> supports, Evaluator evaluator);

  std::size_t size() const noexcept { return supports_.size(); }
  std::size_t source_count() const noexcept { return sources_.size(); }
  const std::vector<SourceDist>& sources() const noexcept { return sources_; }
  const std::vector<Index>& support(Index i) const { return supports_.at(i); }
  const std::vector<std::vector<Index>>& supports() const noexcept { return supports_; }
  std::size_t max_support() const noexcept { return max_support_; }

  /// All sources finite-discrete.
  bool enumerable() const noexcept { return enumerable_; }
  /// Product of source cardinalities (infinity when not enumerable).
  double outcome_count() const noexcept;

  double raw_value(Index i, std::span<const double> sources) const;
  /// Uncentered X_i from the values of its own support, in support order.
  double raw_from_support(Index i, std::span<const double> support_values) const {
    return evaluator_(i, support_values);
  }
  double mean_of(Index i) const noexcept { return centering_ == Centering::None ? 0.0 : means_[i]; }
  /// Centered values X_i (raw minus recorded means when centering is on).
  void evaluate(std::span<const double> sources, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> sources) const;

  Centering centering() const noexcept { return centering_; }
  const std::vector<double>& means() const noexcept { return means_; }
  /// Per-index means by enumerating the support sources of each index.
  void center_exact(std::uint64_t cap = std::uint64_t{1} << 24);
  /// Means from `draws` independent source draws. With `stationary` set all
  /// indices share one law and a single index is estimated.
  void center_monte_carlo(std::uint64_t draws, std::uint64_t seed, bool stationary);
  void set_means(std::vector<double> means, Centering how);

  void draw_sources(const ReplicationStream& stream, std::span<double> out) const noexcept;
  /// Deterministic in (master_seed, replication); the stream key mixes in
  /// the field size so grids sharing a seed get distinct streams.
  Realization sample(std::uint64_t master_seed, std::uint64_t replication) const;
  std::uint64_t stream_key(std::uint64_t master_seed) const noexcept;

  void set_source_sum(SourceSum fn) { source_sum_ = std::move(fn); }
  bool has_source_sum() const noexcept { return static_cast<bool>(source_sum_); }
  /// Centered sum S from sources, via the source sum when available.
  double centered_sum(std::span<const double> sources) const;

  FieldMetadata& metadata() noexcept { return meta_; }
  const FieldMetadata& metadata() const noexcept { return meta_; }

private:
  std::vector<SourceDist> sources_;
  std::vector<std::vector<Index>> supports_;
  Evaluator evaluator_;
  SourceSum source_sum_;
  std::vector<double> means_;
  double mean_total_ = 0.0;
  Centering centering_ = Centering::None;
  std::size_t max_support_ = 0;
  bool enumerable_ = true;
  FieldMetadata meta_;
};

/// A_i = {j : supp(j) meets supp(i)}, A_ij = {k : supp(k) meets supp(i) u supp(j)}
/// (= A_i u A_j). The result is marked independence-verified. Covers are
/// stored when their total size is within `cover_budget`, implicit otherwise.
inline constexpr std::uint64_t kInducedCoverBudget = std::uint64_t{1} << 25;
NeighborhoodSystem induced_neighborhoods(const LatentSourceField& field,
                                         std::uint64_t cover_budget = kInducedCoverBudget);
/// A_i for a single index, by scanning all supports.
IndexSet induced_neighborhood_of(const LatentSourceField& field, Index i);

/// Calls fn(prob, values) for every outcome of the given sources, where
/// values are listed in the order of `which`. Throws EnumerationCapExceeded.
void enumerate_sources(const LatentSourceField& field, std::span<const Index> which, std::uint64_t cap,
                       const std::function<void(double, std::span<const double>)>& fn);

} // namespace locdep
