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

#include "locdep/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "locdep/error.hpp"

namespace locdep {

std::string to_string(Centering c) {
  switch (c) {
  case Centering::None: return "none";
  case Centering::Exact: return "exact";
  case Centering::Analytic: return "analytic";
  case Centering::MonteCarlo: return "monte_carlo";
  case Centering::Supplied: return "supplied";
  }
  return "unknown";
}

LatentSourceField::LatentSourceField(std::vector<SourceDist> sources, std::vector<std::vector<Index>> supports,
                                     Evaluator evaluator)
    : sources_(std::move(sources)), supports_(std::move(supports)), evaluator_(std::move(evaluator)) {
  if (supports_.empty()) throw Error(ErrorCode::InvalidSize, "field needs at least one index");
  if (!evaluator_) throw Error(ErrorCode::InvalidArgument, "field needs an evaluator");
  for (std::size_t i = 0; i < supports_.size(); ++i) {
    const auto& s = supports_[i];
    if (s.empty()) throw Error(ErrorCode::InvalidArgument, "support of index " + std::to_string(i) + " is empty");
    for (Index k : s)
      if (k >= sources_.size())
        throw Error(ErrorCode::InvalidArgument, "support of index " + std::to_string(i) + " names a missing source");
    max_support_ = std::max(max_support_, s.size());
  }
  for (const auto& d : sources_) enumerable_ = enumerable_ && is_discrete(d);
}

double LatentSourceField::outcome_count() const noexcept {
  if (!enumerable_) return std::numeric_limits<double>::infinity();
  double total = 1.0;
  for (const auto& d : sources_) total *= static_cast<double>(std::get<DiscreteDist>(d).size());
  return total;
}

double LatentSourceField::raw_value(Index i, std::span<const double> sources) const {
  const auto& s = supports_[i];
  double buf[16];
  std::vector<double> big;
  double* vals = buf;
  if (s.size() > 16) {
    big.resize(s.size());
    vals = big.data();
  }
  for (std::size_t t = 0; t < s.size(); ++t) vals[t] = sources[s[t]];
  return evaluator_(i, std::span<const double>(vals, s.size()));
}

void LatentSourceField::evaluate(std::span<const double> sources, std::span<double> out) const {
  std::vector<double> vals(max_support_);
  const bool centered = centering_ != Centering::None;
  for (std::size_t i = 0; i < supports_.size(); ++i) {
    const auto& s = supports_[i];
    for (std::size_t t = 0; t < s.size(); ++t) vals[t] = sources[s[t]];
    double x = evaluator_(static_cast<Index>(i), std::span<const double>(vals.data(), s.size()));
    out[i] = centered ? x - means_[i] : x;
  }
}

std::vector<double> LatentSourceField::evaluate(std::span<const double> sources) const {
  std::vector<double> out(size());
  evaluate(sources, out);
  return out;
}

void enumerate_sources(const LatentSourceField& field, std::span<const Index> which, std::uint64_t cap,
                       const std::function<void(double, std::span<const double>)>& fn) {
  std::vector<const DiscreteDist*> dists;
  double total = 1.0;
  for (Index k : which) {
    const auto* d = std::get_if<DiscreteDist>(&field.sources().at(k));
    if (!d) throw Error(ErrorCode::EnumerationCapExceeded, "source " + std::to_string(k) + " is not finite-discrete");
    dists.push_back(d);
    total *= static_cast<double>(d->size());
  }
  if (total > static_cast<double>(cap))
    throw Error(ErrorCode::EnumerationCapExceeded,
                "outcome count " + std::to_string(total) + " exceeds cap " + std::to_string(cap));
  const std::size_t w = which.size();
  std::vector<std::size_t> digit(w, 0);
  std::vector<double> vals(w);
  std::vector<double> prefix(w + 1, 1.0);
  for (std::size_t t = 0; t < w; ++t) {
    vals[t] = dists[t]->values()[0];
    prefix[t + 1] = prefix[t] * dists[t]->probs()[0];
  }
  for (;;) {
    fn(prefix[w], vals);
    // odometer increment, last position fastest
    std::size_t t = w;
    while (t > 0) {
      --t;
      if (++digit[t] < dists[t]->size()) break;
      digit[t] = 0;
      if (t == 0) return;
    }
    if (w == 0) return;
    for (std::size_t u = t; u < w; ++u) {
      vals[u] = dists[u]->values()[digit[u]];
      prefix[u + 1] = prefix[u] * dists[u]->probs()[digit[u]];
    }
  }
}

void LatentSourceField::center_exact(std::uint64_t cap) {
  if (!enumerable_) throw Error(ErrorCode::EnumerationCapExceeded, "exact centering needs finite-discrete sources");
  std::vector<double> means(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double m = 0.0;
    enumerate_sources(*this, supports_[i], cap, [&](double p, std::span<const double> v) {
      m += p * evaluator_(static_cast<Index>(i), v);
    });
    means[i] = m;
  }
  set_means(std::move(means), Centering::Exact);
}

void LatentSourceField::center_monte_carlo(std::uint64_t draws, std::uint64_t seed, bool stationary) {
  if (draws == 0) throw Error(ErrorCode::InvalidArgument, "mean pre-pass needs draws > 0");
  const std::uint64_t key = derive_key(seed, 0x6d65616e70617373ULL);  // "meanpass"
  std::vector<double> src(source_count());
  const std::size_t count = stationary ? 1 : size();
  std::vector<long double> acc(count, 0.0L);
  for (std::uint64_t r = 0; r < draws; ++r) {
    draw_sources(ReplicationStream(key, r), src);
    for (std::size_t i = 0; i < count; ++i) acc[i] += raw_value(static_cast<Index>(i), src);
  }
  std::vector<double> means(size());
  for (std::size_t i = 0; i < size(); ++i)
    means[i] = static_cast<double>(acc[stationary ? 0 : i] / static_cast<long double>(draws));
  meta_.mean_draws = draws;
  set_means(std::move(means), Centering::MonteCarlo);
}

void LatentSourceField::set_means(std::vector<double> means, Centering how) {
  if (how != Centering::None && means.size() != size())
    throw Error(ErrorCode::InvalidSize, "means must have one entry per index");
  means_ = std::move(means);
  centering_ = how;
  mean_total_ = 0.0;
  for (double m : means_) mean_total_ += m;
}

void LatentSourceField::draw_sources(const ReplicationStream& stream, std::span<double> out) const noexcept {
  for (std::size_t k = 0; k < sources_.size(); ++k) out[k] = draw(sources_[k], stream.uniforms(k));
}

std::uint64_t LatentSourceField::stream_key(std::uint64_t master_seed) const noexcept {
  return derive_key(master_seed, size());
}

Realization LatentSourceField::sample(std::uint64_t master_seed, std::uint64_t replication) const {
  Realization r;
  r.seed = master_seed;
  r.replication = replication;
  r.sources.resize(source_count());
  draw_sources(ReplicationStream(stream_key(master_seed), replication), r.sources);
  r.values = evaluate(r.sources);
  return r;
}

double LatentSourceField::centered_sum(std::span<const double> sources) const {
  const double shift = centering_ == Centering::None ? 0.0 : mean_total_;
  if (source_sum_) return source_sum_(sources) - shift;
  std::vector<double> x = evaluate(sources);
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

namespace {

std::vector<std::vector<Index>> source_users(const LatentSourceField& field) {
  std::vector<std::vector<Index>> users(field.source_count());
  for (std::size_t i = 0; i < field.size(); ++i)
    for (Index k : field.support(static_cast<Index>(i))) users[k].push_back(static_cast<Index>(i));
  return users;
}

} // namespace

NeighborhoodSystem induced_neighborhoods(const LatentSourceField& field, std::uint64_t cover_budget) {
  const auto users = source_users(field);
  std::vector<IndexSet> a(field.size());
  std::vector<char> mark(field.size(), 0);
  for (std::size_t i = 0; i < field.size(); ++i) {
    IndexSet& out = a[i];
    for (Index k : field.support(static_cast<Index>(i)))
      for (Index j : users[k])
        if (!mark[j]) {
          mark[j] = 1;
          out.push_back(j);
        }
    for (Index j : out) mark[j] = 0;
    std::sort(out.begin(), out.end());
  }
  std::uint64_t entries = 0;
  for (const auto& ai : a)
    for (Index j : ai) entries += ai.size() + a[j].size();
  auto sys = entries <= cover_budget ? NeighborhoodSystem::with_default_cover(std::move(a))
                                     : NeighborhoodSystem::with_implicit_default_cover(std::move(a));
  sys.mark_independence_verified(true);
  return sys;
}

IndexSet induced_neighborhood_of(const LatentSourceField& field, Index i) {
  IndexSet own(field.support(i).begin(), field.support(i).end());
  std::sort(own.begin(), own.end());
  IndexSet out;
  for (std::size_t j = 0; j < field.size(); ++j) {
    for (Index k : field.support(static_cast<Index>(j)))
      if (std::binary_search(own.begin(), own.end(), k)) {
        out.push_back(static_cast<Index>(j));
        break;
      }
  }
  return out;
}

} // namespace locdep
