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
#include <span>
#include <string>
#include <vector>

#include "locdep/families.hpp"
#include "locdep/graph.hpp"
#include "locdep/neighborhood.hpp"

namespace locdep {

enum class Statistic { W1, W2, W2bar };
std::string to_string(Statistic s);
Statistic parse_statistic(const std::string& name);

/// Pairwise (tree) summation in index order; deterministic for a given input.
double pairwise_sum(std::span<const double> x) noexcept;

struct SumW1 {
  double s = 0.0;
  double w1 = 0.0;
};
/// Throws DegenerateVariance when sigma <= 0.
SumW1 sum_and_w1(std::span<const double> x, double sigma);

/// Y_i = sum_{j in A_i} X_j.
std::vector<double> neighborhood_sums(std::span<const double> x, const NeighborhoodSystem& sys);

struct SelfNormalized {
  double v = 0.0;
  std::optional<double> w2;  // empty when V = 0 (rejected)
};
/// V = sqrt((sum X_i Y_i - n Xbar Ybar)_+), W2 = S / V.
SelfNormalized self_normalized_w2(std::span<const double> x, const NeighborhoodSystem& sys);

/// psi(x) = sqrt(min(max(x, sigma^2 / 4), 2 sigma^2)).
double psi_clamp(double x, double sigma);

struct Clamped {
  double vbar = 0.0;
  double w2bar = 0.0;
};
/// Vbar = psi(sum X_i Y_i), W2bar = S / Vbar.
Clamped clamped_w2bar(std::span<const double> x, const NeighborhoodSystem& sys, double sigma);

struct StatisticValue {
  double s = 0.0;
  std::optional<double> w1;
  double v = 0.0;
  std::optional<double> w2;
  double vbar = 0.0;
  double w2bar = 0.0;
};
/// All statistics at once; w1/vbar/w2bar need sigma > 0 and are left empty
/// (zero) otherwise.
StatisticValue evaluate_statistics(std::span<const double> x, const NeighborhoodSystem& sys, double sigma);

/// Occurrences of w in s: tuples i_1 < ... < i_l with s[i_k] = w[k] and
/// i_{j+1} - i_j <= d_j (== d_j for finite gaps with exact_gaps).
std::uint64_t count_word_occurrences(std::span<const int> s, std::span<const int> w, const GapConstraint& gaps,
                                     bool exact_gaps = false);
/// Occurrences of the order pattern tau in pi under the same gap rules.
std::uint64_t count_pattern_occurrences(std::span<const int> pi, std::span<const int> tau, const GapConstraint& gaps,
                                        bool exact_gaps = false);

struct SubgraphCount {
  std::uint64_t injective_homomorphisms = 0;
  std::uint64_t copies = 0;
  std::uint64_t automorphisms = 0;
};
/// Injective homomorphism count of F in the host and the number of copies
/// (count / |Aut(F)|). Throws GraphTooLarge when n^(v) exceeds cap.
SubgraphCount subgraph_statistic(const SimpleGraph& host, const SimpleGraph& pattern,
                                 std::uint64_t cap = std::uint64_t{1} << 40);

/// U_N = C(N, m)^{-1} sum over m-subsets of h.
double classical_ustat(std::span<const double> data, unsigned m, const Kernel& h);
/// U_d = (1/N) sum_b n_b U_{N,b} over consecutive blocks of the data.
double distributed_ustat(std::span<const double> data, std::span<const std::size_t> block_sizes, unsigned m,
                         const Kernel& h);

} // namespace locdep
