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

#include <map>
#include <memory>
#include <vector>

#include "meshsim/bearer/adv_bearer.hpp"
#include "meshsim/net/mesh_network.hpp"
#include "test_support.hpp"

namespace meshsim::bearer {
namespace {

using radio::FrameKind;
using radio::TransmissionRecord;

std::shared_ptr<const mesh::NetworkPdu> pdu_with(std::size_t payload, std::uint32_t seq = 1) {
  auto p = std::make_shared<mesh::NetworkPdu>();
  p->src = mesh::Address(1);
  p->dst = mesh::Address(0xC000);
  p->seq = seq;
  p->transport_payload.assign(payload, 0xAB);
  return p;
}

struct Harness {
  sim::Simulator sim;
  std::vector<TransmissionRecord> frames;
  std::unique_ptr<AdvBearer> bearer;

  explicit Harness(AdvParams adv = {}, ExtAdvParams ext = {}, std::uint64_t seed = 1) {
    bearer = std::make_unique<AdvBearer>(sim, 0, seed, adv, ext);
    bearer->set_frame_sink([this](const TransmissionRecord& r) { frames.push_back(r); });
  }
};

TEST(PlanAdvEvent, FrameStartsAndChannelOrder) {
  AdvParams p;
  sim::RandomStream rs(1, 0, sim::StreamPurpose::AdvDelay);
  const AdvEventPlan plan = plan_adv_event(p, radio::airtime(37, radio::PhyMode::Uncoded1M), rs, 0);
  EXPECT_EQ(plan.frames[0].start, 0u);
  EXPECT_EQ(plan.frames[1].start, 776u);
  EXPECT_EQ(plan.frames[2].start, 1552u);
  EXPECT_EQ(plan.frames[0].channel, 37);
  EXPECT_EQ(plan.frames[1].channel, 38);
  EXPECT_EQ(plan.frames[2].channel, 39);
  EXPECT_EQ(plan.end, 1552u + 376u);
}

TEST(PlanAdvEvent, NextEventIsIntervalPlusDelay) {
  AdvParams p;
  sim::RandomStream rs(5, 0, sim::StreamPurpose::AdvDelay);
  bool saw_three_ms = false;
  for (int i = 0; i < 10'000; ++i) {
    const sim::SimTime t0 = 1'000'000;
    const AdvEventPlan plan = plan_adv_event(p, 376, rs, t0);
    ASSERT_LE(plan.adv_delay, 10'000u);
    EXPECT_EQ(plan.next_event_start, t0 + 20'000 + plan.adv_delay);
    if (plan.adv_delay == 3'000) {
      saw_three_ms = true;
      EXPECT_EQ(plan.next_event_start, t0 + 23'000);
    }
  }
  (void)saw_three_ms;
}

TEST(Scanner, DefaultRotation) {
  ScanParams p;
  EXPECT_EQ(scanner_channel_at(p, 0).channel, 37);
  EXPECT_EQ(scanner_channel_at(p, 2'000'000).channel, 38);
  EXPECT_EQ(scanner_channel_at(p, 4'000'000).channel, 39);
  EXPECT_EQ(scanner_channel_at(p, 6'000'000).channel, 37);
  EXPECT_EQ(scanner_channel_at(p, 1'999'999).channel, 37);
}

TEST(Scanner, IdleOutsideWindow) {
  ScanParams p;
  p.scan_interval = 2'000'000;
  p.scan_window = 1'000'000;
  EXPECT_EQ(scanner_channel_at(p, 1'500'000).mode, ScanState::Mode::Idle);
  EXPECT_EQ(scanner_channel_at(p, 500'000).mode, ScanState::Mode::Channel);
}

TEST(Scanner, ConstantWithinInterval) {
  ScanParams p;
  const ScanState first = scanner_channel_at(p, 4'000'000);
  for (sim::SimTime t = 4'000'000; t < 6'000'000; t += 12'345) {
    EXPECT_EQ(scanner_channel_at(p, t), first);
  }
}

TEST(Scanner, AllChannelsMode) {
  ScanParams p;
  p.mode = ScanMode::AllChannels;
  EXPECT_EQ(scanner_channel_at(p, 3'000'000).mode, ScanState::Mode::AllPrimary);
  EXPECT_EQ(parse_scan_mode(to_string(ScanMode::AllChannels)), ScanMode::AllChannels);
  EXPECT_FALSE(parse_scan_mode("sometimes"));
}

TEST(AdvBearer, ThreeEventsEmitNineFrames) {
  Harness h;
  h.bearer->enqueue(pdu_with(11), 3);
  h.sim.run(sim::kForever);
  EXPECT_EQ(h.frames.size(), 9u);
  EXPECT_EQ(h.bearer->counters().events, 3u);
  EXPECT_TRUE(h.bearer->idle());
}

TEST(AdvBearer, FifoWithoutInterleaving) {
  Harness h;
  h.bearer->enqueue(pdu_with(11, 1), 3);
  h.bearer->enqueue(pdu_with(11, 2), 2);
  h.sim.run(sim::kForever);
  ASSERT_EQ(h.frames.size(), 15u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(h.frames[i].pdu->seq, 1u);
  for (std::size_t i = 9; i < 15; ++i) EXPECT_EQ(h.frames[i].pdu->seq, 2u);
  EXPECT_LT(h.frames[8].end(), h.frames[9].start);
}

TEST(AdvBearer, OverflowDropsNewest) {
  Harness h;
  for (std::uint32_t i = 1; i <= 33; ++i) h.bearer->enqueue(pdu_with(11, i), 1);
  EXPECT_EQ(h.bearer->counters().dropped_overflow, 1u);
  h.sim.run(sim::kForever);
  ASSERT_EQ(h.frames.size(), 32u * 3u);
  EXPECT_EQ(h.frames.back().pdu->seq, 32u);
}

TEST(AdvBearer, ChannelOrderAndEventSpacing) {
  Harness h({}, {}, 17);
  h.bearer->enqueue(pdu_with(11), 50);
  h.sim.run(sim::kForever);
  ASSERT_EQ(h.frames.size(), 150u);
  for (std::size_t e = 0; e < 50; ++e) {
    EXPECT_EQ(h.frames[3 * e].channel, 37);
    EXPECT_EQ(h.frames[3 * e + 1].channel, 38);
    EXPECT_EQ(h.frames[3 * e + 2].channel, 39);
    if (e > 0) {
      const sim::Duration gap = h.frames[3 * e].start - h.frames[3 * (e - 1)].start;
      EXPECT_GE(gap, 20'000u);
      EXPECT_LE(gap, 30'000u);
    }
  }
}

TEST(AdvBearer, ExtendedEventCarriesIndicationsAndAux) {
  ExtAdvParams ext;
  ext.enabled = true;
  Harness h({}, ext);
  h.bearer->enqueue(pdu_with(50), 1);
  h.sim.run(sim::kForever);
  ASSERT_EQ(h.frames.size(), 4u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(h.frames[i].kind, FrameKind::ExtIndication);
    EXPECT_EQ(h.frames[i].pdu_bytes, 10u);
    EXPECT_EQ(h.frames[i].channel, radio::kPrimaryChannels[i]);
    ASSERT_TRUE(h.frames[i].aux);
    EXPECT_EQ(h.frames[i].aux->start, h.frames[0].start + 1'500);
  }
  const TransmissionRecord& aux = h.frames[3];
  EXPECT_EQ(aux.kind, FrameKind::ExtAux);
  EXPECT_EQ(aux.phy, radio::PhyMode::Uncoded2M);
  EXPECT_EQ(aux.airtime, 244u);
  EXPECT_LE(aux.channel, 36);
  EXPECT_EQ(aux.channel, h.frames[0].aux->channel);
}

TEST(AdvBearer, AuxChannelNeverPrimary) {
  sim::RandomStream rs(3, 0, sim::StreamPurpose::ChannelPick);
  for (int i = 0; i < 10'000; ++i) EXPECT_LE(draw_aux_channel(rs), 36);
}

TEST(AdvParams, Validation) {
  AdvParams a;
  EXPECT_FALSE(a.validate());
  a.adv_interval = 999;
  EXPECT_TRUE(a.validate());
  ScanParams s;
  s.scan_window = s.scan_interval + 1;
  EXPECT_TRUE(s.validate());
}

// A colocated continuous scanner hears each advertising event exactly once
// (the one frame on its current channel).
TEST(AdvBearer, ColocatedScannerHearsEveryEvent) {
  net::MeshNetwork net(1, testing::lossless());
  net.add_node(testing::node_at(0, {0, 0, 0}));
  net.add_node(testing::node_at(1, {1, 0, 0}, false));
  std::map<std::uint32_t, int> per_seq;
  net.on_network_rx = [&](sim::NodeId rx, const mesh::NetworkPdu& p, const net::RxDecision&) {
    if (rx == 1) ++per_seq[p.seq];
  };
  for (int i = 0; i < 20; ++i) {
    net.sim().schedule(static_cast<sim::SimTime>(i) * 200'000, sim::kGlobalTarget,
                       sim::EventKind::Traffic,
                       [&net] { net.publish(0, mesh::Address(2), mesh::Bytes(11, 1)); });
  }
  net.sim().run(sim::kForever);
  EXPECT_EQ(net.node(1).frames_received, 20u * 3u);
  EXPECT_EQ(per_seq.size(), 20u);
}

}  // namespace
}  // namespace meshsim::bearer
