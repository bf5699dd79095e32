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

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "meshsim/mesh/address.hpp"
#include "meshsim/mesh/cache.hpp"
#include "meshsim/mesh/pdu.hpp"

namespace meshsim::mesh {

std::string_view to_string(AddressClass cls) {
  switch (cls) {
    case AddressClass::Unassigned: return "unassigned";
    case AddressClass::Unicast: return "unicast";
    case AddressClass::Virtual: return "virtual";
    case AddressClass::Group: return "group";
  }
  return "unknown";
}

std::string Address::str() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%04X", raw_);
  return buf;
}

Address Address::parse(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
    base = 16;
  }
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value > 0xFFFF) {
    throw std::invalid_argument("bad mesh address: " + std::string(text));
  }
  return Address(static_cast<std::uint16_t>(value));
}

std::size_t transport_header_bytes(const TransportHeader& header) {
  if (std::holds_alternative<SegmentHeader>(header)) return 4;
  return 1;
}

std::size_t legacy_frame_bytes(const NetworkPdu& pdu) {
  constexpr std::size_t kAdvA = 6;
  constexpr std::size_t kAdHeader = 2;    // AD length + AD type
  constexpr std::size_t kNetHeader = 9;   // IVI/NID, CTL/TTL, SEQ, SRC, DST
  constexpr std::size_t kNetMic = 4;
  return kAdvA + kAdHeader + kNetHeader + transport_header_bytes(pdu.header) +
         pdu.transport_payload.size() + kNetMic;
}

MessageCache::MessageCache(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

CacheResult MessageCache::check_insert(Address src, std::uint32_t seq) {
  const Key key{src.raw(), seq};
  if (members_.contains(key)) return CacheResult::Duplicate;
  if (order_.size() == capacity_) {
    members_.erase(order_.front());
    order_.pop_front();
  }
  order_.push_back(key);
  members_.insert(key);
  return CacheResult::Fresh;
}

bool MessageCache::contains(Address src, std::uint32_t seq) const {
  return members_.contains(Key{src.raw(), seq});
}

ReplayResult ReplayTable::check_update(Address src, std::uint8_t epoch, std::uint32_t seq) {
  const std::pair<std::uint8_t, std::uint32_t> incoming{epoch, seq};
  auto it = highest_.find(src.raw());
  if (it != highest_.end() && incoming <= it->second) return ReplayResult::Reject;
  highest_[src.raw()] = incoming;
  return ReplayResult::Accept;
}

std::pair<std::uint8_t, std::uint32_t> ReplayTable::highest(Address src) const {
  auto it = highest_.find(src.raw());
  if (it == highest_.end()) return {0, 0};
  return it->second;
}

}  // namespace meshsim::mesh
