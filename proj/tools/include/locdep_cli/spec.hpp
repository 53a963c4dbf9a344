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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "locdep/distribution.hpp"
#include "locdep/families.hpp"
#include "locdep/graph.hpp"
#include "locdep/neighborhood.hpp"
#include "locdep/oracle.hpp"
#include "locdep/statistics.hpp"

namespace locdep::cli {

/// Schema problem in an experiment document. `where` is a JSON pointer or
/// "line L, column C" for syntax errors.
class SpecError : public std::runtime_error {
public:
  SpecError(std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

private:
  std::string where_;
};

struct FamilySpec {
  std::string family;  // iid | m_dependent | graph | ustat | constrained_ustat | decorated_graph
  SourceDist source = rademacher();

  std::size_t m = 0;
  std::string window = "sum";  // sum | product

  // graph: generated from the grid size, or fixed edges
  std::string graph_kind = "cycle";  // cycle | path | complete | star | edges
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  // ustat
  std::size_t blocks = 1;
  std::vector<std::size_t> block_sizes;  // overrides an equal split when set
  std::string kernel = "mean";  // product | mean | abs_diff | max | sum_product

  // constrained_ustat
  std::string sequence_kind = "word";  // word | pattern
  std::vector<int> word;
  std::vector<double> letter_probs;
  std::vector<int> pattern;
  GapConstraint gaps;
  bool exact_gaps = false;

  // decorated_graph (subgraph counts in G(n, p))
  std::uint32_t pattern_vertices = 3;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pattern_edges{{0, 1}, {1, 2}, {0, 2}};
  double p = 0.5;
};

struct CheckerSpec {
  bool enabled = false;
  std::string suite = "random";  // random | field
  std::size_t instances = 200;
  std::size_t max_n = 10;
  IndexSet a{0}, b_set{0};
  double lo = 0.0, hi = 0.0, c = 1.0;
  XiFunction xi = xi_constant(1.0);
  double p = 1.0;
  bool ld_check = true;
};

struct Assertions {
  std::optional<double> ks_max;
  std::optional<std::pair<double, double>> slope_range;
  std::optional<double> ratio_spread_max;
  std::optional<double> reject_fraction_max;
  bool ks_decreasing = false;
};

enum class Mode { Exact, MonteCarlo };

struct ExperimentSpec {
  std::string text;  // raw document, hashed into artifacts
  FamilySpec family;
  std::vector<std::size_t> grid;
  Statistic statistic = Statistic::W1;
  Mode mode = Mode::MonteCarlo;
  std::uint64_t replications = 10000;
  std::uint64_t seed = 0;
  std::vector<std::string> bounds;  // empty: family defaults
  std::string ratio_bound;          // bound used for the ks / shape table
  CheckerSpec checkers;
  std::optional<NeighborhoodSystem> declared;  // user-declared A_i (1-based JSON)
  Assertions assertions;
  std::string output = "locdep_out";
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> cap;
};

SourceDist parse_dist_text(const std::string& json_text);
ExperimentSpec parse_spec(const std::string& text);

bool bound_fits_family(const std::string& bound, const std::string& family);
/// Bounds evaluated when the document lists none.
std::vector<std::string> default_bounds(const std::string& family);

Kernel kernel_by_name(const std::string& name);
SimpleGraph pattern_graph(const FamilySpec& f);
/// edge | triangle | path3 | square | star3
SimpleGraph named_pattern_graph(const std::string& name);
LatentSourceField build_field(const FamilySpec& f, std::size_t n);
/// Block sizes for a grid size n: explicit sizes, or an equal split.
std::vector<std::size_t> ustat_blocks(const FamilySpec& f, std::size_t n);

} // namespace locdep::cli
