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

#include <gtest/gtest.h>

#include <stdexcept>

#include "meshsim/mesh/address.hpp"
#include "meshsim/mesh/cache.hpp"
#include "meshsim/mesh/pdu.hpp"

namespace meshsim::mesh {
namespace {

const Address A{0x0001};
const Address B{0x0002};

TEST(Address, ClassBoundaries) {
  EXPECT_EQ(classify_address(0x0000), AddressClass::Unassigned);
  EXPECT_EQ(classify_address(0x0001), AddressClass::Unicast);
  EXPECT_EQ(classify_address(0x7FFF), AddressClass::Unicast);
  EXPECT_EQ(classify_address(0x8000), AddressClass::Virtual);
  EXPECT_EQ(classify_address(0xBFFF), AddressClass::Virtual);
  EXPECT_EQ(classify_address(0xC000), AddressClass::Group);
  EXPECT_EQ(classify_address(0xFFFF), AddressClass::Group);
}

TEST(Address, TextRoundTrip) {
  EXPECT_EQ(Address(0x00AB).str(), "0x00AB");
  EXPECT_EQ(Address::parse("0xC001"), Address(0xC001));
  EXPECT_EQ(Address::parse("17"), Address(17));
  EXPECT_THROW(Address::parse("0x10000"), std::invalid_argument);
  EXPECT_THROW(Address::parse("zz"), std::invalid_argument);
  for (std::uint32_t raw = 0; raw <= 0xFFFF; raw += 97) {
    const Address a(static_cast<std::uint16_t>(raw));
    EXPECT_EQ(Address::parse(a.str()), a);
  }
}

TEST(Address, UnicastForIndexIsOneBased) {
  EXPECT_EQ(unicast_for_index(0), Address(0x0001));
  EXPECT_TRUE(unicast_for_index(32766).is_unicast());
}

TEST(MessageCache, RepeatIsDuplicate) {
  MessageCache c;
  EXPECT_EQ(c.check_insert(A, 1), CacheResult::Fresh);
  EXPECT_EQ(c.check_insert(A, 1), CacheResult::Duplicate);
  EXPECT_EQ(c.capacity(), 255u);
}

TEST(MessageCache, FifoEviction) {
  MessageCache c(2);
  c.check_insert(A, 1);
  c.check_insert(A, 2);
  c.check_insert(A, 3);
  EXPECT_FALSE(c.contains(A, 1));
  EXPECT_EQ(c.check_insert(A, 1), CacheResult::Fresh);
  EXPECT_EQ(c.size(), 2u);
}

TEST(MessageCache, KeyedBySourceAndSequence) {
  MessageCache c;
  EXPECT_EQ(c.check_insert(A, 1), CacheResult::Fresh);
  EXPECT_EQ(c.check_insert(B, 1), CacheResult::Fresh);
}

TEST(ReplayTable, EqualIsRejected) {
  ReplayTable t;
  ASSERT_EQ(t.check_update(A, 0, 10), ReplayResult::Accept);
  EXPECT_EQ(t.check_update(A, 0, 10), ReplayResult::Reject);
}

TEST(ReplayTable, HigherSequenceAccepted) {
  ReplayTable t;
  t.check_update(A, 0, 10);
  EXPECT_EQ(t.check_update(A, 0, 11), ReplayResult::Accept);
  EXPECT_EQ(t.highest(A), std::make_pair(std::uint8_t{0}, std::uint32_t{11}));
}

TEST(ReplayTable, EpochDominates) {
  ReplayTable t;
  t.check_update(A, 0, 10);
  EXPECT_EQ(t.check_update(A, 1, 1), ReplayResult::Accept);
  EXPECT_EQ(t.check_update(A, 0, 500), ReplayResult::Reject);
}

TEST(ReplayTable, SourcesAreIndependent) {
  ReplayTable t;
  t.check_update(A, 0, 10);
  EXPECT_EQ(t.check_update(B, 0, 3), ReplayResult::Accept);
  EXPECT_TRUE(t.knows(B));
  t.clear();
  EXPECT_FALSE(t.knows(A));
}

TEST(Pdu, LegacyFrameSizes) {
  NetworkPdu p;
  p.src = A;
  p.dst = B;
  p.transport_payload.assign(11, 0);
  EXPECT_EQ(legacy_frame_bytes(p), 33u);
  p.transport_payload.assign(kMaxLegacyTransportPayload, 0);
  EXPECT_EQ(legacy_frame_bytes(p), 37u);  // the largest legacy advertisement
  p.header = SegmentHeader{1, 0, 4};
  p.transport_payload.assign(12, 0);
  EXPECT_EQ(legacy_frame_bytes(p), 37u);
  EXPECT_TRUE(p.is_segment());
  EXPECT_FALSE(p.is_control());
}

}  // namespace
}  // namespace meshsim::mesh
