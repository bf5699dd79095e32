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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "meshsim/net/mesh_network.hpp"
#include "meshsim/transport/access.hpp"
#include "meshsim/transport/segmentation.hpp"
#include "test_support.hpp"

namespace meshsim::transport {
namespace {

using mesh::Address;
using mesh::Bytes;
using testing::lossless;
using testing::node_at;

Bytes counting(std::size_t n) {
  Bytes b(n);
  std::iota(b.begin(), b.end(), std::uint8_t{1});
  return b;
}

TEST(Segmentation, ElevenBytesUnsegmented) {
  const SegmentPlan p = segment_payload(counting(11));
  EXPECT_FALSE(p.segmented);
  ASSERT_EQ(p.units.size(), 1u);
  EXPECT_EQ(p.units[0].size(), 11u);
}

TEST(Segmentation, FiftyBytesFiveSegments) {
  const SegmentPlan p = segment_payload(counting(50));
  EXPECT_TRUE(p.segmented);
  std::vector<std::size_t> sizes;
  for (const Bytes& u : p.units) sizes.push_back(u.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{12, 12, 12, 12, 2}));
}

TEST(Segmentation, ThresholdBoundary) {
  EXPECT_FALSE(segment_payload(counting(15)).segmented);
  const SegmentPlan p = segment_payload(counting(16));
  EXPECT_TRUE(p.segmented);
  EXPECT_EQ(p.units.size(), 2u);
}

TEST(Segmentation, CapAt384Bytes) {
  EXPECT_EQ(segment_payload(counting(384)).units.size(), 32u);
  EXPECT_THROW(segment_payload(counting(385)), PayloadTooLarge);
}

TEST(Segmentation, ExtendedLimitKeepsLargePayloadWhole) {
  const SegmentPlan p = segment_payload(counting(200), mesh::kMaxExtendedTransportPayload);
  EXPECT_FALSE(p.segmented);
}

TEST(Reassembler, AnyOrderCompletesOnce) {
  const SegmentPlan plan = segment_payload(counting(30));
  ASSERT_EQ(plan.units.size(), 3u);
  std::vector<std::uint8_t> order{0, 1, 2};
  do {
    Reassembler r(2);
    int completions = 0;
    for (std::uint8_t i : order) {
      if (r.add(i, 2, plan.units[i]) == Reassembler::AddResult::Completed) ++completions;
    }
    EXPECT_EQ(completions, 1);
    EXPECT_EQ(r.payload(), counting(30));
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(Reassembler, DuplicateSegmentIdempotent) {
  const SegmentPlan plan = segment_payload(counting(30));
  Reassembler r(2);
  EXPECT_EQ(r.add(1, 2, plan.units[1]), Reassembler::AddResult::Stored);
  EXPECT_EQ(r.add(1, 2, plan.units[1]), Reassembler::AddResult::Duplicate);
  EXPECT_EQ(r.add(0, 2, plan.units[0]), Reassembler::AddResult::Stored);
  EXPECT_EQ(r.add(2, 2, plan.units[2]), Reassembler::AddResult::Completed);
  EXPECT_EQ(r.add(1, 2, plan.units[1]), Reassembler::AddResult::AlreadyComplete);
}

TEST(Reassembler, RejectsInconsistentSegments) {
  Reassembler r(2);
  EXPECT_EQ(r.add(3, 2, Bytes(12, 0)), Reassembler::AddResult::Invalid);
  EXPECT_EQ(r.add(0, 4, Bytes(12, 0)), Reassembler::AddResult::Invalid);
}

TEST(Reassembler, BlockAckFlagsGap) {
  const SegmentPlan plan = segment_payload(counting(50));
  Reassembler r(4);
  for (std::uint8_t i : {0, 1, 3, 4}) r.add(i, 4, plan.units[i]);
  EXPECT_EQ(r.block_ack(), 0b11011u);
  SegmentedTransfer t(4);
  t.apply_ack(r.block_ack());
  EXPECT_EQ(t.missing(), std::vector<std::uint8_t>{2});
  EXPECT_FALSE(t.complete());
  t.apply_ack(0b00100);
  EXPECT_TRUE(t.complete());
}

TEST(FullBlockMask, Edges) {
  EXPECT_EQ(full_block_mask(0), 1u);
  EXPECT_EQ(full_block_mask(4), 0x1Fu);
  EXPECT_EQ(full_block_mask(31), 0xFFFFFFFFu);
}

TEST(AppMessage, RoundTripWithPadding) {
  AppMessage m{Opcode::Command, 42, 7, {1, 2, 3}};
  const Bytes b = encode_app(m, 20);
  EXPECT_EQ(b.size(), 20u);
  EXPECT_EQ(decode_app(b), m);
  Bytes corrupt = b;
  corrupt.back() ^= 0xFF;
  EXPECT_FALSE(decode_app(corrupt));
  EXPECT_FALSE(decode_app(Bytes{0x77, 0, 0}));
}

// Two nodes one metre apart; every copy of segment 2 sent before segment 4
// first goes out is lost. Only segment 2 may be sent again.
TEST(SegmentedDelivery, RetransmitsOnlyMissingSegment) {
  net::MeshNetwork net(1, lossless());
  net.add_node(node_at(0, {0, 0, 0}, false));
  net.add_node(node_at(1, {1, 0, 0}, false));
  std::map<std::uint8_t, int> frames_per_index;
  net.on_transmit = [&](const radio::TransmissionRecord& r) {
    if (r.tx_node == 0 && r.pdu && r.pdu->is_segment()) {
      ++frames_per_index[std::get<mesh::SegmentHeader>(r.pdu->header).seg_index];
    }
  };
  net.force_drop = [&](sim::NodeId, const radio::TransmissionRecord& r) {
    if (!r.pdu || !r.pdu->is_segment() || frames_per_index.contains(4)) return false;
    return std::get<mesh::SegmentHeader>(r.pdu->header).seg_index == 2;
  };
  std::vector<Bytes> delivered;
  net.set_access_handler(1, [&](const net::AccessMessage& m) { delivered.push_back(m.payload); });
  bool sent_ok = false;
  net.sim().schedule(10, sim::kGlobalTarget, sim::EventKind::Traffic, [&] {
    net::SendOptions o;
    o.on_sent = [&](bool ok) { sent_ok = ok; };
    net.publish(0, Address(2), counting(50), o);
  });
  net.sim().run(sim::kForever);
  ASSERT_EQ(delivered.size(), 1u);
  EXPECT_EQ(delivered[0], counting(50));
  EXPECT_TRUE(sent_ok);
  const int once = 3 * 3;  // source events x primary channels
  for (std::uint8_t i : {0, 1, 3, 4}) EXPECT_EQ(frames_per_index[i], once) << "segment " << int{i};
  EXPECT_GT(frames_per_index[2], once);
}

TEST(SegmentedDelivery, ExtendedBeatsLegacyForFiftyBytes) {
  auto latency = [](bool extended) {
    net::MeshNetwork net(4, lossless());
    auto a = node_at(0, {0, 0, 0}, false);
    auto b = node_at(1, {2, 0, 0}, false);
    a.ext.enabled = b.ext.enabled = extended;
    net.add_node(a);
    net.add_node(b);
    sim::SimTime at = 0;
    net.set_access_handler(1, [&](const net::AccessMessage& m) { at = m.at; });
    net.sim().schedule(1000, sim::kGlobalTarget, sim::EventKind::Traffic,
                       [&] { net.publish(0, Address(2), counting(50)); });
    net.sim().run(sim::kForever);
    return at - 1000;
  };
  const sim::Duration legacy = latency(false);
  const sim::Duration ext = latency(true);
  EXPECT_GT(legacy, 0u);
  EXPECT_GT(ext, 0u);
  EXPECT_LT(ext, legacy);
}

TEST(Extended, MissingEveryIndicationMeansNoPayload) {
  net::MeshNetwork net(1, lossless());
  auto a = node_at(0, {0, 0, 0}, false);
  auto b = node_at(1, {1, 0, 0}, false);
  a.ext.enabled = b.ext.enabled = true;
  net.add_node(a);
  net.add_node(b);
  net.force_drop = [](sim::NodeId, const radio::TransmissionRecord& r) {
    return r.kind == radio::FrameKind::ExtIndication;
  };
  int got = 0;
  net.set_access_handler(1, [&](const net::AccessMessage&) { ++got; });
  net.sim().schedule(10, sim::kGlobalTarget, sim::EventKind::Traffic,
                     [&] { net.publish(0, Address(2), counting(50)); });
  net.sim().run(sim::kForever);
  EXPECT_EQ(got, 0);
}

struct Star {
  net::MeshNetwork net;
  AccessRouter router;
  AckedMessaging acked;
  std::vector<sim::NodeId> servers;

  Star(std::size_t n, std::uint64_t seed = 1, ExchangeParams params = {})
      : net(seed, lossless()), router(net), acked(router, params) {
    net.add_node(node_at(0, {0, 0, 0}, false));
    for (std::size_t i = 0; i < n; ++i) {
      const double angle = 6.283185307179586 * static_cast<double>(i) / static_cast<double>(n);
      auto c = node_at(static_cast<std::uint32_t>(i + 1), {3 * std::cos(angle), 3 * std::sin(angle), 0},
                       false);
      c.subscriptions = {Address(0xC001)};
      servers.push_back(net.add_node(c));
      acked.serve(servers.back());
    }
  }
};

TEST(AckedExchange, UnicastLossFreeOneTransmission) {
  Star s(1);
  s.net.sim().schedule(1000, sim::kGlobalTarget, sim::EventKind::Traffic, [&] {
    s.acked.send(0, s.net.node(1).config.unicast, ExchangeMode::Unicast, {1});
  });
  s.net.sim().run(sim::kForever);
  const Exchange& ex = s.acked.exchange(1);
  EXPECT_EQ(ex.command_tx, 1u);
  EXPECT_TRUE(ex.settled);
  ASSERT_TRUE(ex.recipients[0].t_status);
  EXPECT_GT(*ex.recipients[0].t_status, *ex.recipients[0].t_deliver);
}

TEST(AckedExchange, GroupSevenServersSevenStatuses) {
  Star s(7);
  std::uint64_t command_frames = 0;
  s.net.on_transmit = [&](const radio::TransmissionRecord& r) {
    if (r.tx_node == 0) ++command_frames;
  };
  int statuses = 0;
  s.acked.on_status = [&](const Exchange&, const RecipientOutcome&) { ++statuses; };
  s.net.sim().schedule(1000, sim::kGlobalTarget, sim::EventKind::Traffic, [&] {
    s.acked.send(0, Address(0xC001), ExchangeMode::Group, s.servers);
  });
  s.net.sim().run(sim::kForever);
  EXPECT_EQ(statuses, 7);
  EXPECT_EQ(command_frames, 6u);  // 2 events x 3 channels, regardless of group size
  EXPECT_EQ(s.acked.exchange(1).command_tx, 1u);
}

TEST(AckedExchange, GroupCommandLostAtOneServer) {
  Star s(7);
  const sim::NodeId victim = s.servers[3];
  s.net.force_drop = [&](sim::NodeId rx, const radio::TransmissionRecord& r) {
    return rx == victim && r.tx_node == 0;
  };
  s.net.sim().schedule(1000, sim::kGlobalTarget, sim::EventKind::Traffic, [&] {
    s.acked.send(0, Address(0xC001), ExchangeMode::Group, s.servers);
  });
  s.net.sim().run(sim::kForever);
  const Exchange& ex = s.acked.exchange(1);
  int delivered = 0;
  for (const RecipientOutcome& r : ex.recipients) {
    if (r.t_deliver) ++delivered;
    if (r.node == victim) EXPECT_FALSE(r.t_status);
  }
  EXPECT_EQ(delivered, 6);
}

TEST(AckedExchange, UnicastRetriesWithDoublingBackoff) {
  Star s(1);
  std::vector<sim::SimTime> command_starts;
  s.net.on_transmit = [&](const radio::TransmissionRecord& r) {
    if (r.tx_node == 0 && r.channel == 37) command_starts.push_back(r.start);
  };
  // Server 1 is deaf to the controller for the first 2 s.
  s.net.force_drop = [&](sim::NodeId rx, const radio::TransmissionRecord& r) {
    return rx == 1 && r.tx_node == 0 && r.start < 2'000'000;
  };
  s.net.sim().schedule(1000, sim::kGlobalTarget, sim::EventKind::Traffic, [&] {
    s.acked.send(0, s.net.node(1).config.unicast, ExchangeMode::Unicast, {1});
  });
  s.net.sim().run(sim::kForever);
  const Exchange& ex = s.acked.exchange(1);
  EXPECT_TRUE(ex.settled);
  EXPECT_GE(ex.command_tx, 3u);
  // Each retry starts after the previous transmission plus a growing wait.
  ASSERT_GE(command_starts.size(), 3u * 3u);
  std::vector<sim::SimTime> first_event;
  for (std::size_t i = 0; i < command_starts.size(); i += 3) first_event.push_back(command_starts[i]);
  for (std::size_t i = 2; i < first_event.size(); ++i) {
    EXPECT_GT(first_event[i] - first_event[i - 1], first_event[i - 1] - first_event[i - 2]);
  }
}

TEST(AckedExchange, RejectsMismatchedDestinations) {
  Star s(1);
  EXPECT_THROW(s.acked.send(0, Address(0xC001), ExchangeMode::Unicast, {1}), std::invalid_argument);
  EXPECT_THROW(s.acked.send(0, Address(2), ExchangeMode::Group, {1}), std::invalid_argument);
}

TEST(Subscriptions, SubscribeThenUnsubscribe) {
  net::MeshNetwork net(1, lossless());
  net.add_node(node_at(0, {0, 0, 0}, false));
  net.add_node(node_at(1, {1, 0, 0}, false));
  net.add_node(node_at(2, {0, 1, 0}, false));
  int got1 = 0;
  int got2 = 0;
  net.set_access_handler(1, [&](const net::AccessMessage&) { ++got1; });
  net.set_access_handler(2, [&](const net::AccessMessage&) { ++got2; });
  net.subscribe(1, Address(0xC001));
  net.subscribe(2, Address(0xC002));
  auto publish_at = [&](sim::SimTime t) {
    net.sim().schedule(t, sim::kGlobalTarget, sim::EventKind::Traffic,
                       [&] { net.publish(0, Address(0xC001), Bytes(11, 0)); });
  };
  publish_at(1000);
  net.sim().schedule(500'000, sim::kGlobalTarget, sim::EventKind::Traffic,
                     [&] { net.unsubscribe(1, Address(0xC001)); });
  publish_at(600'000);
  net.sim().run(sim::kForever);
  EXPECT_EQ(got1, 1);  // only the first publish
  EXPECT_EQ(got2, 0);  // other group never delivered
  EXPECT_THROW(net.subscribe(1, Address(3)), std::invalid_argument);
}

}  // namespace
}  // namespace meshsim::transport
