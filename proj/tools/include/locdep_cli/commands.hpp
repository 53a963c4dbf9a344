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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "locdep/field.hpp"
#include "locdep/harness.hpp"
#include "locdep/moments.hpp"
#include "locdep/neighborhood.hpp"
#include "locdep/oracle.hpp"
#include "locdep_cli/spec.hpp"

namespace locdep::cli {

struct RunOptions {
  unsigned threads = 1;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::filesystem::path out;
  std::ostream* log = nullptr;  // progress notes; null for quiet
};

/// What a stage produced and which assertions failed.
struct Outcome {
  std::vector<std::string> artifacts;
  std::vector<std::string> failures;
  bool passed() const noexcept { return failures.empty(); }
  void merge(Outcome other);
};

/// One grid point of an experiment, built lazily.
struct GridPoint {
  std::size_t n = 0;
  std::optional<LatentSourceField> field;
  std::optional<NeighborhoodSystem> sys;
  std::optional<DerivedNeighborhoods> derived;
  std::optional<ExactLaw> law;
  std::optional<MomentTable> table;
};

class Experiment {
public:
  Experiment(ExperimentSpec spec, RunOptions opts);

  const ExperimentSpec& spec() const noexcept { return spec_; }
  const RunOptions& options() const noexcept { return opts_; }
  std::size_t points() const noexcept { return grid_.size(); }

  LatentSourceField& field(std::size_t g);
  /// The declared system when present, otherwise the one induced by the supports.
  const NeighborhoodSystem& system(std::size_t g);
  const DerivedNeighborhoods& derived(std::size_t g);
  /// Full joint law; only for enumerable fields within the cap.
  const ExactLaw& law(std::size_t g);
  bool exact_feasible(std::size_t g);
  const MomentTable& table(std::size_t g);
  BoundReport bound(std::size_t g, const std::string& name);

  Outcome derive();
  Outcome bounds();
  Outcome oracle();
  /// Empirical (or, in exact mode, exact) Kolmogorov distances over the grid;
  /// with `fit` set also the rate regression and the ratio table.
  Outcome statistics(bool fit);
  /// Every stage plus the run manifest.
  Outcome run();

private:
  std::vector<EmpiricalSummary> summaries();
  void write(const std::string& name, const std::string& body, Outcome& out) const;
  void note(const std::string& text) const;

  ExperimentSpec spec_;
  RunOptions opts_;
  std::vector<GridPoint> grid_;
  std::optional<std::vector<EmpiricalSummary>> summaries_;
  std::optional<HoeffdingProjection> projection_;
};

/// Threads from --threads, else LOCDEP_THREADS, else the spec, else hardware.
unsigned resolve_cli_threads(std::optional<unsigned> flag, const ExperimentSpec& spec);

struct CountRequest {
  std::string kind;  // word | pattern | subgraph
  std::string sequence, target, gaps;
  bool exact_gaps = false;
  std::uint32_t vertices = 0;  // host graph
  std::string edges;           // host edges "1-2,2-3"
  std::string pattern = "triangle";
};

/// Naive counters, for cross-checking field sums by hand.
std::uint64_t run_count(const CountRequest& req);

} // namespace locdep::cli
