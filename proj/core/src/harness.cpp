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

#include "locdep/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "locdep/enumeration.hpp"
#include "locdep/error.hpp"
#include "locdep/normal.hpp"
#include "locdep/rng.hpp"

namespace locdep {

double ks_statistic(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  std::sort(values.begin(), values.end());
  const double r = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double phi = normal_cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / r - phi, phi - static_cast<double>(i) / r});
  }
  return std::min(d, 1.0);
}

EmpiricalSummary mc_run(const LatentSourceField& field, const NeighborhoodSystem* sys, Statistic stat,
                        const McOptions& opts) {
  if (opts.replications < 1000) throw Error(ErrorCode::InvalidArgument, "Monte-Carlo runs need R >= 1000");
  if (stat != Statistic::W2 && !(opts.sigma > 0.0))
    throw Error(ErrorCode::DegenerateVariance, "W1 and W2bar need sigma > 0");
  const bool fast = stat == Statistic::W1 && field.has_source_sum();
  if (!fast && stat != Statistic::W1 && !sys)
    throw Error(ErrorCode::InvalidArgument, "self-normalized statistics need a neighborhood system");
  if (sys && sys->size() != field.size()) throw Error(ErrorCode::InvalidSize, "field and system sizes differ");

  const std::uint64_t reps = opts.replications;
  const std::uint64_t key = field.stream_key(opts.seed);
  constexpr std::uint64_t kChunk = 256;
  const std::size_t chunks = static_cast<std::size_t>((reps + kChunk - 1) / kChunk);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> values(reps, nan);
  parallel_chunks(chunks, opts.threads, [&](std::size_t c) {
    std::vector<double> src(field.source_count()), x(fast ? 0 : field.size());
    const std::uint64_t end = std::min<std::uint64_t>(reps, (c + 1) * kChunk);
    for (std::uint64_t r = c * kChunk; r < end; ++r) {
      field.draw_sources(ReplicationStream(key, r), src);
      if (fast) {
        values[r] = field.centered_sum(src) / opts.sigma;
        continue;
      }
      field.evaluate(src, x);
      switch (stat) {
      case Statistic::W1: values[r] = pairwise_sum(x) / opts.sigma; break;
      case Statistic::W2: {
        const auto sn = self_normalized_w2(x, *sys);
        if (sn.w2) values[r] = *sn.w2;
        break;
      }
      case Statistic::W2bar: values[r] = clamped_w2bar(x, *sys, opts.sigma).w2bar; break;
      }
    }
  });

  EmpiricalSummary s;
  s.family = field.metadata().family;
  const auto grid = field.metadata().params.find("n");
  s.n = grid != field.metadata().params.end() ? static_cast<std::size_t>(grid->second) : field.size();
  s.statistic = stat;
  s.replications = reps;
  std::vector<double> kept;
  kept.reserve(reps);
  for (std::uint64_t r = 0; r < reps; ++r) {
    if (std::isnan(values[r]))
      s.rejected_indices.push_back(r);
    else
      kept.push_back(values[r]);
  }
  s.rejected = s.rejected_indices.size();
  if (static_cast<double>(s.rejected) > opts.max_reject_fraction * static_cast<double>(reps))
    throw Error(ErrorCode::ExcessRejections, std::to_string(s.rejected) + " of " + std::to_string(reps) +
                                                 " replications had V = 0");
  if (kept.empty()) throw Error(ErrorCode::ExcessRejections, "every replication was rejected");
  const double m = static_cast<double>(kept.size());
  double mean = 0.0, m4 = 0.0;
  for (double v : kept) mean += v, m4 += v * v * v * v;
  mean /= m;
  m4 /= m;
  double var = 0.0, var4 = 0.0;
  for (double v : kept) {
    var += (v - mean) * (v - mean);
    const double d4 = v * v * v * v - m4;
    var4 += d4 * d4;
  }
  s.mean = mean;
  s.variance = kept.size() > 1 ? var / (m - 1.0) : 0.0;
  s.m4 = m4;
  s.m4_se = kept.size() > 1 ? std::sqrt(var4 / (m - 1.0) / m) : 0.0;
  s.ks = ks_statistic(std::move(kept));
  s.ks_band = 1.358 / std::sqrt(static_cast<double>(reps));
  if (opts.keep_samples) s.samples = std::move(values);
  return s;
}

RateFit rate_fit(const std::vector<RatePoint>& points) {
  if (points.size() < 3) throw Error(ErrorCode::DegeneratePoints, "rate fit needs at least 3 points");
  double sx = 0, sy = 0;
  for (const auto& p : points) {
    if (!(p.ks > 0.0) || !(p.n > 0.0)) throw Error(ErrorCode::DegeneratePoints, "rate fit needs n > 0 and ks > 0");
    sx += std::log(p.n);
    sy += std::log(p.ks);
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double dx = std::log(p.n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.ks) - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegeneratePoints, "rate fit needs distinct n");
  RateFit f;
  f.points = points;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double res = 0.0;
  for (const auto& p : points) {
    const double e = std::log(p.ks) - (f.intercept + f.slope * std::log(p.n));
    res += e * e;
  }
  f.residual = std::sqrt(res);
  return f;
}

RatioTable ratio_table(const std::vector<EmpiricalSummary>& summaries, const std::vector<BoundReport>& reports) {
  if (summaries.size() != reports.size() || summaries.empty())
    throw Error(ErrorCode::GridMismatch, "summaries and bound reports must pair up one to one");
  RatioTable t;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t g = 0; g < summaries.size(); ++g) {
    const auto it = reports[g].inputs.find("n");
    const double n = static_cast<double>(summaries[g].n);
    if (it == reports[g].inputs.end() || it->second != n)
      throw Error(ErrorCode::GridMismatch, "grid point " + std::to_string(g) + " has mismatched n");
    if (!(reports[g].value > 0.0)) throw Error(ErrorCode::GridMismatch, "bound shape must be positive");
    RatioRow row;
    row.n = n;
    row.ks = summaries[g].ks;
    row.shape = reports[g].value;
    row.ratio = row.ks / row.shape;
    row.band = summaries[g].ks_band / row.shape;
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    t.rows.push_back(row);
  }
  t.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return t;
}

} // namespace locdep
