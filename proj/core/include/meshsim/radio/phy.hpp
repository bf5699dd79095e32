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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

#include "meshsim/sim/engine.hpp"

namespace meshsim::radio {

enum class PhyMode : std::uint8_t { Uncoded1M, Uncoded2M, Coded500k, Coded125k };

std::string_view to_string(PhyMode phy);
std::optional<PhyMode> parse_phy(std::string_view text);

/// On-air framing constants. Uncoded frames are
///   preamble+AA | header | payload | CRC
/// at the PHY bit rate. Coded frames spend a fixed block on preamble, AA,
/// CI and TERM fields, then send header+payload+CRC at the coded rate.
struct FramingConstants {
  static constexpr std::uint32_t kPreambleAa1M = 40;
  static constexpr std::uint32_t kPreambleAa2M = 48;
  static constexpr std::uint32_t kHeaderBits = 16;
  static constexpr std::uint32_t kCrcBits = 24;
  static constexpr std::uint32_t kCodedFixedUs = 430;
  static constexpr std::uint32_t kCodedFactor500k = 2;
  static constexpr std::uint32_t kCodedFactor125k = 8;
};

constexpr std::uint64_t bit_rate(PhyMode phy) {
  switch (phy) {
    case PhyMode::Uncoded1M: return 1'000'000;
    case PhyMode::Uncoded2M: return 2'000'000;
    case PhyMode::Coded500k: return 500'000;
    case PhyMode::Coded125k: return 125'000;
  }
  return 1'000'000;
}

/// Frame duration in microseconds for a PDU payload of `pdu_bytes`
/// (the advertising PDU body, excluding header and CRC).
constexpr sim::Duration airtime(std::uint32_t pdu_bytes, PhyMode phy) {
  using F = FramingConstants;
  const std::uint64_t body_bits = F::kHeaderBits + 8ULL * pdu_bytes + F::kCrcBits;
  switch (phy) {
    case PhyMode::Uncoded1M: return F::kPreambleAa1M + body_bits;
    case PhyMode::Uncoded2M: return (F::kPreambleAa2M + body_bits + 1) / 2;
    case PhyMode::Coded500k: return F::kCodedFixedUs + F::kCodedFactor500k * body_bits;
    case PhyMode::Coded125k: return F::kCodedFixedUs + F::kCodedFactor125k * body_bits;
  }
  return 0;
}

inline constexpr std::uint8_t kPrimaryChannels[3] = {37, 38, 39};
constexpr bool is_primary_channel(std::uint8_t ch) { return ch >= 37 && ch <= 39; }

}  // namespace meshsim::radio
