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

#include "meshsim/transport/segmentation.hpp"

#include <algorithm>
#include <string>

namespace meshsim::transport {

SegmentPlan segment_payload(const mesh::Bytes& payload, std::size_t max_unsegmented) {
  if (payload.empty()) throw std::invalid_argument("empty access payload");
  SegmentPlan plan;
  if (payload.size() <= max_unsegmented) {
    plan.units.push_back(payload);
    return plan;
  }
  if (payload.size() > kMaxSegmentedPayload) {
    throw PayloadTooLarge("payload of " + std::to_string(payload.size()) +
                          " bytes exceeds 32 segments");
  }
  plan.segmented = true;
  for (std::size_t off = 0; off < payload.size(); off += kSegmentSize) {
    const std::size_t n = std::min(kSegmentSize, payload.size() - off);
    plan.units.emplace_back(payload.begin() + static_cast<std::ptrdiff_t>(off),
                            payload.begin() + static_cast<std::ptrdiff_t>(off + n));
  }
  return plan;
}

Reassembler::Reassembler(std::uint8_t seg_last) : seg_last_(seg_last), parts_(seg_last + 1u) {}

Reassembler::AddResult Reassembler::add(std::uint8_t seg_index, std::uint8_t seg_last,
                                        const mesh::Bytes& data) {
  if (seg_last != seg_last_ || seg_index > seg_last_) return AddResult::Invalid;
  if (emitted_) return AddResult::AlreadyComplete;
  const std::uint32_t bit = 1u << seg_index;
  if (received_ & bit) return AddResult::Duplicate;
  received_ |= bit;
  parts_[seg_index] = data;
  if (complete()) {
    emitted_ = true;
    return AddResult::Completed;
  }
  return AddResult::Stored;
}

mesh::Bytes Reassembler::payload() const {
  mesh::Bytes out;
  for (const auto& part : parts_) out.insert(out.end(), part.begin(), part.end());
  return out;
}

std::vector<std::uint8_t> SegmentedTransfer::missing() const {
  std::vector<std::uint8_t> out;
  for (std::uint8_t i = 0; i <= seg_last_; ++i) {
    if (!(acked_ & (1u << i))) out.push_back(i);
    if (i == 31) break;
  }
  return out;
}

mesh::Bytes encode_segment_ack(std::uint16_t seq_zero, std::uint32_t block_ack) {
  return {static_cast<std::uint8_t>(seq_zero >> 8), static_cast<std::uint8_t>(seq_zero),
          static_cast<std::uint8_t>(block_ack >> 24), static_cast<std::uint8_t>(block_ack >> 16),
          static_cast<std::uint8_t>(block_ack >> 8), static_cast<std::uint8_t>(block_ack)};
}

}  // namespace meshsim::transport
