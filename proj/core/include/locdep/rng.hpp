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

#include <array>
#include <cstdint>

namespace locdep {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

/// splitmix64 finalizer; used to fold tags into stream keys.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a stream key from a master seed and a tag (grid point, purpose...).
std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t tag) noexcept;

/// Maps 64 random bits to a double in the open interval (0, 1).
inline double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Random numbers for one replication. Slot s always yields the same values
/// for a given (key, replication), independent of which other slots are read,
/// so replications can be generated in any order on any worker.
class ReplicationStream {
public:
  ReplicationStream(std::uint64_t key, std::uint64_t replication) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        rep_lo_(static_cast<std::uint32_t>(replication)),
        rep_hi_(static_cast<std::uint32_t>(replication >> 32)) {}

  std::array<std::uint32_t, 4> block(std::uint64_t slot) const noexcept {
    return philox4x32({rep_lo_, rep_hi_, static_cast<std::uint32_t>(slot), static_cast<std::uint32_t>(slot >> 32)},
                      key_);
  }

  /// Two independent uniforms on (0, 1) for the given slot.
  std::array<double, 2> uniforms(std::uint64_t slot) const noexcept {
    const auto b = block(slot);
    return {to_open_unit((std::uint64_t{b[0]} << 32) | b[1]), to_open_unit((std::uint64_t{b[2]} << 32) | b[3])};
  }

private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t rep_lo_;
  std::uint32_t rep_hi_;
};

/// Sequential convenience generator over consecutive slots of one stream.
/// Satisfies UniformRandomBitGenerator so it can drive <random> adaptors.
class SlotGenerator {
public:
  using result_type = std::uint64_t;

  SlotGenerator(std::uint64_t key, std::uint64_t replication, std::uint64_t first_slot = 0) noexcept
      : stream_(key, replication), slot_(first_slot) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    if (have_ == 0) {
      buf_ = stream_.block(slot_++);
      have_ = 2;
    }
    --have_;
    const std::size_t o = have_ == 1 ? 0 : 2;
    return (std::uint64_t{buf_[o]} << 32) | buf_[o + 1];
  }

  double uniform() noexcept { return to_open_unit((*this)()); }

private:
  ReplicationStream stream_;
  std::uint64_t slot_;
  std::array<std::uint32_t, 4> buf_{};
  int have_ = 0;
};

} // namespace locdep
