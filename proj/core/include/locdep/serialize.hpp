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

#include "locdep/bounds.hpp"
#include "locdep/harness.hpp"
#include "locdep/moments.hpp"
#include "locdep/oracle.hpp"

namespace locdep {

/// Identifies the run that produced an artifact.
struct ArtifactStamp {
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string config_hash(const std::string& text);

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);
/// RFC-4180 field quoting.
std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

/// Columns: config_hash, seed, index, l2, l3, l4, se2, se3, se4 (1-based index).
std::string moments_csv(const MomentTable& table, const ArtifactStamp& stamp);
/// Tables of a size grid in one file; columns config_hash, seed, n, mode, index, l2, l3, l4, se2, se3, se4.
std::string moments_grid_csv(const std::vector<std::size_t>& ns, const std::vector<MomentTable>& tables,
                             const ArtifactStamp& stamp);
std::string moments_json(const MomentTable& table, const ArtifactStamp& stamp);

std::string bounds_json(const std::vector<BoundReport>& reports, const ArtifactStamp& stamp);
/// Columns: config_hash, seed, n, theorem, term, value. One row per term plus a "total" row.
std::string bound_grid_csv(const std::vector<BoundReport>& reports, const ArtifactStamp& stamp);

/// Columns: config_hash, seed, instance, id, lhs, rhs, constant, margin, precondition, verdict, detail.
std::string verdicts_csv(const std::vector<InequalityVerdict>& verdicts, const ArtifactStamp& stamp);

/// Columns: config_hash, seed, family, n, statistic, R, ks, ks_band, rejected, slope.
std::string summary_csv(const std::vector<EmpiricalSummary>& summaries, std::optional<double> slope,
                        const ArtifactStamp& stamp);

/// Columns: config_hash, seed, theorem, n, ks, shape, ratio, band, spread.
std::string ratio_csv(const RatioTable& table, const std::string& theorem, const ArtifactStamp& stamp);
/// Whitespace-separated columns log_n, log_ks, fitted; '#' comment header.
std::string rate_plot_data(const RateFit& fit, const ArtifactStamp& stamp);

} // namespace locdep
