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

#include "locdep/codec.hpp"

#include <limits>

#include "locdep/error.hpp"

namespace locdep {

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  __extension__ using u128 = unsigned __int128;
  u128 r = 1;
  for (std::uint64_t t = 1; t <= k; ++t) {
    r = r * (n - k + t) / t;
    if (r > std::numeric_limits<std::uint64_t>::max())
      throw Error(ErrorCode::InvalidArgument, "binomial coefficient overflows 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t colex_rank(std::span<const std::uint32_t> subset) {
  std::uint64_t r = 0;
  for (std::size_t t = 0; t < subset.size(); ++t) {
    if (t > 0 && subset[t] <= subset[t - 1])
      throw Error(ErrorCode::InvalidArgument, "colex_rank expects a strictly increasing subset");
    r += binom(subset[t], t + 1);
  }
  return r;
}

std::vector<std::uint32_t> colex_unrank(std::uint64_t rank, unsigned k) {
  std::vector<std::uint32_t> out(k);
  for (unsigned t = k; t-- > 0;) {
    // largest c with C(c, t+1) <= rank
    std::uint32_t c = t;
    while (binom(c + 1, t + 1) <= rank) ++c;
    out[t] = c;
    rank -= binom(c, t + 1);
  }
  return out;
}

InjectionCodec::InjectionCodec(std::uint32_t n, std::uint32_t v) : n_(n), v_(v), size_(1) {
  if (v > n) throw Error(ErrorCode::InvalidArgument, "injection needs v <= n");
  for (std::uint32_t t = 0; t < v; ++t) {
    if (size_ > std::numeric_limits<std::uint64_t>::max() / (n - t))
      throw Error(ErrorCode::GraphTooLarge, "number of injections overflows 64 bits");
    size_ *= n - t;
  }
}

std::uint64_t InjectionCodec::rank(std::span<const std::uint32_t> phi) const {
  if (phi.size() != v_) throw Error(ErrorCode::InvalidArgument, "injection length mismatch");
  std::uint64_t r = 0;
  for (std::uint32_t t = 0; t < v_; ++t) {
    if (phi[t] >= n_) throw Error(ErrorCode::InvalidArgument, "injection value out of range");
    std::uint32_t digit = phi[t];
    for (std::uint32_t s = 0; s < t; ++s) {
      if (phi[s] == phi[t]) throw Error(ErrorCode::InvalidArgument, "map is not injective");
      if (phi[s] < phi[t]) --digit;
    }
    r = r * (n_ - t) + digit;
  }
  return r;
}

std::vector<std::uint32_t> InjectionCodec::unrank(std::uint64_t rank) const {
  if (rank >= size_) throw Error(ErrorCode::InvalidArgument, "injection rank out of range");
  std::vector<std::uint32_t> digits(v_);
  for (std::uint32_t t = v_; t-- > 0;) {
    digits[t] = static_cast<std::uint32_t>(rank % (n_ - t));
    rank /= n_ - t;
  }
  std::vector<std::uint32_t> phi(v_);
  std::vector<bool> used(n_, false);
  for (std::uint32_t t = 0; t < v_; ++t) {
    std::uint32_t d = digits[t];
    std::uint32_t x = 0;
    for (;; ++x) {
      if (used[x]) continue;
      if (d == 0) break;
      --d;
    }
    used[x] = true;
    phi[t] = x;
  }
  return phi;
}

} // namespace locdep
