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
#include <span>
#include <utility>
#include <vector>

namespace locdep {

/// Binomial coefficient; throws InvalidArgument on 64-bit overflow.
std::uint64_t binom(std::uint64_t n, std::uint64_t k);

/// Colexicographic rank of a sorted 0-based k-subset: sum_t C(c_t, t+1).
std::uint64_t colex_rank(std::span<const std::uint32_t> subset);
std::vector<std::uint32_t> colex_unrank(std::uint64_t rank, unsigned k);

/// Position of the unordered pair {a, b}, a != b, in colex order of 2-subsets.
inline std::uint64_t pair_index(std::uint32_t a, std::uint32_t b) noexcept {
  if (a > b) std::swap(a, b);
  return std::uint64_t{b} * (b - 1) / 2 + a;
}

/// Mixed-radix codec for injections {0..v-1} -> {0..n-1}. Digit t is the
/// rank of phi(t) among the values not used by phi(0..t-1), radix n - t.
class InjectionCodec {
public:
  InjectionCodec(std::uint32_t n, std::uint32_t v);

  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t v() const noexcept { return v_; }
  std::uint64_t size() const noexcept { return size_; }

  std::uint64_t rank(std::span<const std::uint32_t> phi) const;
  std::vector<std::uint32_t> unrank(std::uint64_t rank) const;

private:
  std::uint32_t n_;
  std::uint32_t v_;
  std::uint64_t size_;
};

} // namespace locdep
