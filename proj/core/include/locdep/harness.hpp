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
#include <string>
#include <utility>
#include <vector>

#include "locdep/bounds.hpp"
#include "locdep/field.hpp"
#include "locdep/neighborhood.hpp"
#include "locdep/statistics.hpp"

namespace locdep {

struct McOptions {
  std::uint64_t replications = 10000;
  std::uint64_t seed = 1;
  /// Normalizer for W1 and the clamp level for W2bar.
  double sigma = 0.0;
  unsigned threads = 1;
  double max_reject_fraction = 0.01;
  bool keep_samples = false;
};

struct EmpiricalSummary {
  std::string family;
  std::size_t n = 0;  // family size parameter (metadata "n"), else the index count
  Statistic statistic = Statistic::W1;
  std::uint64_t replications = 0;
  double ks = 0.0;
  double ks_band = 0.0;  // 1.358 / sqrt(R), the 95% DKW radius
  std::uint64_t rejected = 0;
  std::vector<std::uint64_t> rejected_indices;
  double mean = 0.0;
  double variance = 0.0;
  double m4 = 0.0;     // sample E W^4
  double m4_se = 0.0;  // standard error of m4
  std::vector<double> samples;  // by replication index, rejected ones NaN
};

/// R replications of the statistic; replication r always uses stream r of
/// the field key, so results do not depend on the thread count. `sys` may be
/// null for W1. Throws ExcessRejections past the configured W2 fraction.
EmpiricalSummary mc_run(const LatentSourceField& field, const NeighborhoodSystem* sys, Statistic stat,
                        const McOptions& opts);

/// sup |F_R - Phi| by the order-statistic formula; sorts its argument.
double ks_statistic(std::vector<double> values);

struct RatePoint {
  double n = 0.0;
  double ks = 0.0;
};

struct RateFit {
  std::vector<RatePoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // Euclidean norm of log-scale residuals
};

/// Least squares of log ks on log n.
RateFit rate_fit(const std::vector<RatePoint>& points);

struct RatioRow {
  double n = 0.0;
  double ks = 0.0;
  double shape = 0.0;
  double ratio = 0.0;
  double band = 0.0;  // ks_band / shape
};

struct RatioTable {
  std::vector<RatioRow> rows;
  double spread = 0.0;  // max ratio / min ratio
};

/// ks / shape per grid point; the grids must agree on n.
RatioTable ratio_table(const std::vector<EmpiricalSummary>& summaries, const std::vector<BoundReport>& reports);

} // namespace locdep
