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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locdep/moments.hpp"
#include "locdep/neighborhood.hpp"

namespace locdep {

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

/// Right-hand side of a Berry-Esseen type bound with the unspecified
/// absolute constant set to 1 ("shape"), or an explicit-constant quantity.
struct BoundReport {
  std::string theorem;
  double value = 0.0;
  std::vector<BoundTerm> terms;
  std::string constant_policy = "C=1 shape";
  std::map<std::string, double> inputs;
  /// First-order band from Monte-Carlo standard errors of the moment table.
  double uncertainty = 0.0;
  std::vector<std::string> flags;

  /// Value of a named term; throws InvalidArgument when absent.
  double term(const std::string& name) const;
};

inline constexpr std::uint64_t kDefaultTermBudget = 1'000'000'000;

BoundReport bound_main(const MomentTable& table, std::size_t kappa, std::size_t tau);
/// lambda * main shape with lambda = kappa sum ||X_i||_2^2 / sigma^2.
BoundReport bound_self_normalized(const MomentTable& table, std::size_t kappa, std::size_t tau);

/// beta_1 + beta_2 + beta_3, every nested sum taken literally over the system.
BoundReport bound_general_beta(const MomentTable& table, const NeighborhoodSystem& sys,
                               const DerivedNeighborhoods& derived, std::uint64_t budget = kDefaultTermBudget);

/// Dependency graph of maximal degree d.
BoundReport bound_graph(const MomentTable& table, std::size_t d);
BoundReport bound_graph_self_normalized(const MomentTable& table, std::size_t d);

struct DistributedUInputs {
  double sigma1 = 0.0;
  double kernel_l4 = 0.0;        // ||h||_4, uncentered
  double kernel_variance = 0.0;  // Var h(X_1..X_m)
  unsigned m = 2;
  std::vector<std::size_t> block_sizes;
};

/// Terms "normalized" = (m / sqrt N) ||h||_4^3 / sigma_1^3 and
/// "block_correction" = m Var(h) / (N sigma_1^2) sum n_i / (n_i - m + 1).
/// inputs["variance_deviation"] holds the |Var(W) - 1| bound.
BoundReport bound_distributed_u(const DistributedUInputs& in);
double distributed_u_variance_deviation(const DistributedUInputs& in);

/// Norms are taken from raw_l2/raw_l4 (uncentered f_i) when present.
/// sigma_fd defaults to sigma_n / n^{b - 1/2}.
BoundReport bound_constrained_u(const MomentTable& table, std::size_t n, std::size_t b,
                                std::optional<double> sigma_fd = std::nullopt);
BoundReport bound_constrained_u_self_normalized(const MomentTable& table, std::size_t n, std::size_t b,
                                                std::optional<double> sigma_fd = std::nullopt);

/// Decorated homomorphism sums over injections of a v-vertex pattern.
BoundReport bound_decorated(const MomentTable& table, std::size_t n, std::size_t v);
BoundReport bound_decorated_self_normalized(const MomentTable& table, std::size_t n, std::size_t v);

/// Independent blocks with per-block kappa_i, tau_i; sigma^2 is the sum of
/// the block variances.
BoundReport bound_distributed_general(const std::vector<MomentTable>& blocks, const std::vector<std::size_t>& kappa,
                                      const std::vector<std::size_t>& tau);

/// N_A = {k : A_k meets A}.
IndexSet reverse_closure(const NeighborhoodSystem& sys, const IndexSet& a);
/// D_A = {(i, j) : j in A_i, A_ij meets A}.
std::vector<IndexPair> interference_of(const NeighborhoodSystem& sys, const IndexSet& a);

/// gamma_A = sum_{D_A} ||X_i||_4 ||X_j||_4.
double gamma_set(const MomentTable& table, const NeighborhoodSystem& sys, const IndexSet& a);
/// gamma = sum_i sum_{j in A_i} sum_{k in A_ij} sum_{l in N_k u A_k} of fourth norms.
double gamma_full(const MomentTable& table, const NeighborhoodSystem& sys, const DerivedNeighborhoods& derived,
                  std::uint64_t budget = kDefaultTermBudget);

struct ConcentrationDeltas {
  std::array<double, 8> delta{};
  double sum() const noexcept;
};
ConcentrationDeltas concentration_deltas(const MomentTable& table, const NeighborhoodSystem& sys,
                                   const DerivedNeighborhoods& derived, const IndexSet& a, const IndexSet& b_set,
                                   double lo, double hi, double c, std::uint64_t budget = kDefaultTermBudget);

struct SelfNormalizedConcentrationDeltas {
  double lambda = 0.0;
  std::array<double, 5> delta{};  // delta[0] = (b - a) / 1500
  double sum() const noexcept;
};
SelfNormalizedConcentrationDeltas self_normalized_concentration_deltas(const MomentTable& table, const NeighborhoodSystem& sys,
                                   const DerivedNeighborhoods& derived, const IndexSet& a, const IndexSet& b_set,
                                   double lo, double hi, double c);

} // namespace locdep
