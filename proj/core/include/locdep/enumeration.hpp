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
#include <span>
#include <vector>

#include "locdep/field.hpp"

namespace locdep {

/// Default cap on the number of source outcomes visited by full enumeration.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

/// Calls fn(prob, sources, values) for every joint source outcome of the
/// field. Outcomes are visited in mixed-radix order, last source fastest.
void enumerate_field(const LatentSourceField& field, std::uint64_t cap,
                     const std::function<void(double, std::span<const double>, std::span<const double>)>& fn);

/// Materialized joint law of (X_1..X_n): one row per source outcome.
/// Rows are kept unmerged so that any functional of the field can be
/// evaluated exactly.
class ExactLaw {
public:
  ExactLaw() = default;
  ExactLaw(std::size_t n, std::vector<double> probs, std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  std::size_t outcomes() const noexcept { return probs_.size(); }
  double prob(std::size_t k) const noexcept { return probs_[k]; }
  std::span<const double> row(std::size_t k) const noexcept { return {values_.data() + k * n_, n_}; }
  const std::vector<double>& probs() const noexcept { return probs_; }

  double expectation(const std::function<double(std::span<const double>)>& fn) const;

private:
  std::size_t n_ = 0;
  std::vector<double> probs_;
  std::vector<double> values_;
};

/// Enumerates the field into an ExactLaw, splitting the outcome range over
/// `threads` workers (0 = hardware concurrency). Rows are stored in outcome
/// order regardless of the thread count.
ExactLaw exact_law(const LatentSourceField& field, std::uint64_t cap = std::uint64_t{1} << 20, unsigned threads = 1);

/// Worker count for parallel loops: `requested`, or hardware concurrency when 0.
unsigned resolve_threads(unsigned requested) noexcept;

/// Runs body(chunk) for chunk in [0, chunks) on `threads` workers.
void parallel_chunks(std::size_t chunks, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace locdep
