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

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "meshsim/mesh/address.hpp"

namespace meshsim::mesh {

using Bytes = std::vector<std::uint8_t>;
using SubnetId = std::uint16_t;

inline constexpr std::uint8_t kMaxTtl = 127;
inline constexpr std::uint32_t kMaxSeq = 0xFFFFFF;

/// Transport payload bytes allowed in one legacy / extended advertisement.
inline constexpr std::size_t kMaxLegacyTransportPayload = 15;
inline constexpr std::size_t kMaxExtendedTransportPayload = 255;

/// Lower-transport framing carried alongside the payload bytes.
struct UnsegmentedAccess {
  bool operator==(const UnsegmentedAccess&) const = default;
};
struct SegmentHeader {
  std::uint16_t seq_zero = 0;  // low 13 bits of the first segment's seq
  std::uint8_t seg_index = 0;
  std::uint8_t seg_last = 0;   // seg_count - 1
  bool operator==(const SegmentHeader&) const = default;
};
struct SegmentAck {
  std::uint16_t seq_zero = 0;
  std::uint32_t block_ack = 0;
  bool operator==(const SegmentAck&) const = default;
};
using TransportHeader = std::variant<UnsegmentedAccess, SegmentHeader, SegmentAck>;

struct NetworkPdu {
  SubnetId subnet = 0;
  std::uint8_t epoch = 0;
  std::uint8_t ttl = 0;
  std::uint32_t seq = 0;
  Address src;
  Address dst;
  TransportHeader header = UnsegmentedAccess{};
  Bytes transport_payload;

  [[nodiscard]] bool is_control() const { return std::holds_alternative<SegmentAck>(header); }
  [[nodiscard]] bool is_segment() const { return std::holds_alternative<SegmentHeader>(header); }
  bool operator==(const NetworkPdu&) const = default;
};

/// Bytes of lower-transport header that precede the payload on air.
std::size_t transport_header_bytes(const TransportHeader& header);

/// Advertising-PDU payload length (AdvA + AD header + network PDU + NetMIC)
/// for a legacy advertisement carrying `pdu`. 15 payload bytes unsegmented
/// or one 12-byte segment both fill the 37-byte legacy limit.
std::size_t legacy_frame_bytes(const NetworkPdu& pdu);

}  // namespace meshsim::mesh
