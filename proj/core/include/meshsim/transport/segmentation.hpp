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
#include <optional>
#include <stdexcept>
#include <vector>

#include "meshsim/mesh/pdu.hpp"
#include "meshsim/sim/engine.hpp"

namespace meshsim::transport {

inline constexpr std::size_t kSegmentSize = 12;
inline constexpr std::size_t kMaxSegments = 32;
inline constexpr std::size_t kMaxSegmentedPayload = kSegmentSize * kMaxSegments;  // 384

struct TransportParams {
  sim::Duration segment_retry = 300'000;
  std::uint8_t max_block_retries = 4;
  sim::Duration ack_timer = 150'000;
  sim::Duration reassembly_timeout = 10'000'000;
};

class PayloadTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct SegmentPlan {
  bool segmented = false;
  std::vector<mesh::Bytes> units;
};

/// Splits an access payload for the lower transport. Payloads up to
/// `max_unsegmented` bytes travel whole; longer ones become 12-byte
/// segments (the last may be short). Throws PayloadTooLarge beyond 32
/// segments, and std::invalid_argument for an empty payload.
SegmentPlan segment_payload(const mesh::Bytes& payload,
                            std::size_t max_unsegmented = mesh::kMaxLegacyTransportPayload);

constexpr std::uint32_t full_block_mask(std::uint8_t seg_last) {
  return seg_last >= 31 ? 0xFFFFFFFFu : ((1u << (seg_last + 1)) - 1);
}

/// Receiver-side buffer for one SeqAuth.
class Reassembler {
 public:
  explicit Reassembler(std::uint8_t seg_last);

  enum class AddResult : std::uint8_t { Stored, Duplicate, Completed, AlreadyComplete, Invalid };

  AddResult add(std::uint8_t seg_index, std::uint8_t seg_last, const mesh::Bytes& data);

  [[nodiscard]] std::uint32_t block_ack() const { return received_; }
  [[nodiscard]] bool complete() const { return received_ == full_block_mask(seg_last_); }
  [[nodiscard]] std::uint8_t seg_last() const { return seg_last_; }
  /// Concatenated payload; valid once complete.
  [[nodiscard]] mesh::Bytes payload() const;

 private:
  std::uint8_t seg_last_;
  std::uint32_t received_ = 0;
  bool emitted_ = false;
  std::vector<mesh::Bytes> parts_;
};

/// Sender-side acknowledgement bookkeeping for one segmented transfer.
class SegmentedTransfer {
 public:
  explicit SegmentedTransfer(std::uint8_t seg_last) : seg_last_(seg_last) {}

  void apply_ack(std::uint32_t block_ack) { acked_ |= (block_ack & full_block_mask(seg_last_)); }
  [[nodiscard]] bool complete() const { return acked_ == full_block_mask(seg_last_); }
  [[nodiscard]] std::vector<std::uint8_t> missing() const;
  [[nodiscard]] std::uint32_t acked() const { return acked_; }

 private:
  std::uint8_t seg_last_;
  std::uint32_t acked_ = 0;
};

/// SegmentAck payload: seq_zero (2 bytes) + block ack (4 bytes), big endian.
mesh::Bytes encode_segment_ack(std::uint16_t seq_zero, std::uint32_t block_ack);

}  // namespace meshsim::transport
