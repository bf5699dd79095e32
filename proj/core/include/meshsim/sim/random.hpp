// Copyright 2026 The meshsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string_view>

namespace meshsim::sim {

enum class StreamPurpose : std::uint8_t {
  AdvDelay = 1,
  Shadowing = 2,
  ChannelPick = 3,
  Mobility = 4,
  Loss = 5,
  Topology = 6,
  Traffic = 7,
  ScanPhase = 8,
  Cooperation = 9,
};

std::string_view to_string(StreamPurpose purpose);

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: draw i is a pure function of
/// (master_seed, node, purpose, i). Streams never share state, so adding
/// draws to one purpose leaves every other stream untouched.
class RandomStream {
 public:
  RandomStream() = default;
  RandomStream(std::uint64_t master_seed, std::uint64_t node, StreamPurpose purpose);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double next_double();
  /// Uniform integer in the closed range [lo, hi].
  std::uint64_t draw_range(std::uint64_t lo, std::uint64_t hi);
  /// Standard normal via Box-Muller.
  double next_normal();

  [[nodiscard]] std::uint64_t draws() const { return counter_; }
  [[nodiscard]] std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t node, StreamPurpose purpose);

}  // namespace meshsim::sim
