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
#include <optional>
#include <string>
#include <vector>

#include "locdep/enumeration.hpp"
#include "locdep/families.hpp"
#include "locdep/field.hpp"
#include "locdep/neighborhood.hpp"

namespace locdep {

enum class MomentMode { Exact, ExactLocal, Symmetric, MonteCarlo };
std::string to_string(MomentMode mode);

/// Per-index absolute-moment norms ||X_i||_p = (E|X_i|^p)^{1/p}, p = 2, 3, 4,
/// plus sigma^2 = Var(S) and lambda = kappa sum ||X_i||_2^2 / sigma^2.
struct MomentTable {
  std::vector<double> l2, l3, l4;
  std::vector<double> se2, se3, se4;  // zero for exact entries
  /// Norms of the uncentered values, when the field is centered
  /// (constrained U-statistic bounds are stated for f_i itself).
  std::vector<double> raw_l2, raw_l4;
  double sigma2 = 0.0;
  double sigma2_se = 0.0;
  /// sum_i sum_{j in A_i} Cov(X_i, X_j), when computed.
  std::optional<double> sigma2_identity;
  std::size_t kappa = 0;
  double lambda = 0.0;  // NaN when kappa is unknown or sigma2 = 0
  MomentMode mode = MomentMode::Exact;
  std::uint64_t replications = 0;
  std::string sigma2_provenance;
  bool degenerate = false;
  std::optional<double> sigma1, kernel_l4, kernel_variance, theta;

  std::size_t size() const noexcept { return l2.size(); }
  double sigma() const;
};

/// Full enumeration: E|X_i|^p from the joint law, sigma^2 both as Var(S) and
/// through the covariance identity over A_i.
MomentTable exact_moment_table(const ExactLaw& law, const NeighborhoodSystem& sys);
MomentTable exact_moment_table(const LatentSourceField& field, const NeighborhoodSystem& sys,
                               std::uint64_t cap = std::uint64_t{1} << 20);

/// Per-index enumeration over each support (and each union of supports for
/// the covariances); sigma^2 through the covariance identity. Scales to large
/// fields whose supports are small.
MomentTable local_moment_table(const LatentSourceField& field, const NeighborhoodSystem& sys,
                               std::uint64_t cap = std::uint64_t{1} << 20);

/// For fields whose law is invariant under a transitive group acting on the
/// indices (e.g. subgraph counts in G(n, p)): every X_i has the law of X_rep
/// and sigma^2 = |I| sum_{j in A_rep} Cov(X_rep, X_j). kappa may be passed
/// in (0 leaves lambda undefined).
MomentTable symmetric_moment_table(const LatentSourceField& field, Index representative, std::size_t kappa = 0,
                                   std::uint64_t cap = std::uint64_t{1} << 20);

/// Monte-Carlo table from `reps` >= 1000 replications; standard errors from
/// `batches` batch means. Runs on `threads` workers with results independent
/// of the worker count.
MomentTable mc_moment_table(const LatentSourceField& field, const NeighborhoodSystem& sys, std::uint64_t reps,
                            std::uint64_t seed, unsigned batches = 32, unsigned threads = 1);

/// Replaces sigma^2 by a closed form and recomputes lambda.
void set_analytic_variance(MomentTable& table, double sigma2, const std::string& provenance);

struct HoeffdingProjection {
  double sigma1 = 0.0;
  double theta = 0.0;
  double kernel_variance = 0.0;
  double kernel_l4 = 0.0;  // (E|h|^4)^{1/4}
  bool exact = true;
};

/// sigma_1^2 = Var(E[h(X_1..X_m) | X_1]) for a symmetric kernel. Exact for
/// discrete sources; otherwise nested Monte Carlo with `reps` outer draws
/// (two independent inner estimates per outer draw keep E[g^2] unbiased).
/// Throws DegenerateKernel when sigma_1^2 <= tol * max(1, Var h).
HoeffdingProjection hoeffding_sigma1(const Kernel& h, unsigned m, const SourceDist& dist, std::uint64_t reps = 4000,
                                     std::uint64_t seed = 1, double tol = 1e-12);

} // namespace locdep
