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

#include <cmath>
#include <vector>

#include "meshsim/radio/phy.hpp"
#include "meshsim/radio/propagation.hpp"
#include "meshsim/radio/reception.hpp"
#include "meshsim/sim/random.hpp"

namespace meshsim::radio {
namespace {

TEST(Airtime, LegacyFrameAtOneMegabit) { EXPECT_EQ(airtime(37, PhyMode::Uncoded1M), 376u); }

TEST(Airtime, LegacyFrameAtTwoMegabit) { EXPECT_EQ(airtime(37, PhyMode::Uncoded2M), 192u); }

TEST(Airtime, FiftyByteAuxFrameAtTwoMegabit) { EXPECT_EQ(airtime(50, PhyMode::Uncoded2M), 244u); }

TEST(Airtime, CodedPhysAddFixedBlock) {
  // 430 µs plus body bits times the coding factor.
  EXPECT_EQ(airtime(10, PhyMode::Coded500k), 430u + 2u * (16 + 80 + 24));
  EXPECT_EQ(airtime(10, PhyMode::Coded125k), 430u + 8u * (16 + 80 + 24));
}

TEST(Airtime, StrictlyIncreasingAndTwoMegabitFaster) {
  for (PhyMode phy :
       {PhyMode::Uncoded1M, PhyMode::Uncoded2M, PhyMode::Coded500k, PhyMode::Coded125k}) {
    for (std::uint32_t n = 1; n < 255; ++n) EXPECT_GT(airtime(n + 1, phy), airtime(n, phy));
  }
  for (std::uint32_t n = 1; n <= 255; ++n) {
    EXPECT_LT(airtime(n, PhyMode::Uncoded2M), airtime(n, PhyMode::Uncoded1M));
  }
}

TEST(Phy, RatesAndNames) {
  EXPECT_EQ(bit_rate(PhyMode::Uncoded1M), 1'000'000u);
  EXPECT_EQ(bit_rate(PhyMode::Uncoded2M), 2'000'000u);
  EXPECT_EQ(bit_rate(PhyMode::Coded500k), 500'000u);
  EXPECT_EQ(bit_rate(PhyMode::Coded125k), 125'000u);
  for (PhyMode phy :
       {PhyMode::Uncoded1M, PhyMode::Uncoded2M, PhyMode::Coded500k, PhyMode::Coded125k}) {
    EXPECT_EQ(parse_phy(to_string(phy)), phy);
  }
  EXPECT_FALSE(parse_phy("3M"));
}

TEST(LinkRssi, ReferenceDistance) {
  PropagationParams p;
  EXPECT_DOUBLE_EQ(link_rssi(p, {0, 0, 0}, {1, 0, 0}, 0.0), -40.0);
}

TEST(LinkRssi, TenMetresWithExponent27) {
  PropagationParams p;
  p.path_loss_exponent = 2.7;
  EXPECT_NEAR(link_rssi(p, {0, 0, 0}, {10, 0, 0}, 0.0), -67.0, 1e-9);
}

TEST(LinkRssi, FloorPenaltyIsAdditive) {
  PropagationParams p;
  const double same = link_rssi(p, {0, 0, 0}, {6, 8, 0}, 0.0);
  const double up = link_rssi(p, {0, 0, 0}, {6, 8, 1}, 0.0);
  EXPECT_NEAR(same - up, 25.0, 1e-9);
}

TEST(LinkRssi, ClampsTinyDistances) {
  PropagationParams p;
  EXPECT_DOUBLE_EQ(link_rssi(p, {1, 1, 0}, {1, 1, 0}, 0.0),
                   link_rssi(p, {0, 0, 0}, {kMinDistanceM, 0, 0}, 0.0));
}

TEST(LinkRssi, SymmetricWithSharedShadow) {
  PropagationParams p;
  sim::RandomStream rs(1, 0, sim::StreamPurpose::Topology);
  for (int i = 0; i < 200; ++i) {
    const Position a{rs.next_double() * 30, rs.next_double() * 30, static_cast<int>(i % 2)};
    const Position b{rs.next_double() * 30, rs.next_double() * 30, 0};
    const sim::NodeId x = i;
    const sim::NodeId y = i + 1000;
    const double s_ab = link_shadow_db(7, x, y, 4.0);
    const double s_ba = link_shadow_db(7, y, x, 4.0);
    ASSERT_EQ(s_ab, s_ba);
    EXPECT_EQ(link_rssi(p, a, b, s_ab), link_rssi(p, b, a, s_ba));
  }
  EXPECT_EQ(link_shadow_db(7, 1, 2, 0.0), 0.0);
}

TEST(PropagationParams, Validation) {
  PropagationParams p;
  EXPECT_FALSE(p.validate());
  p.background_loss_prob = 1.5;
  EXPECT_TRUE(p.validate());
  p.background_loss_prob = 0.1;
  p.pl0_db = std::nan("");
  EXPECT_TRUE(p.validate());
}

TransmissionRecord frame(std::uint8_t channel, sim::SimTime start, sim::NodeId tx = 0) {
  TransmissionRecord r;
  r.tx_node = tx;
  r.channel = channel;
  r.start = start;
  r.pdu_bytes = 37;
  r.airtime = airtime(37, PhyMode::Uncoded1M);
  return r;
}

ReceiverWindow tuned(std::uint8_t ch) {
  ReceiverWindow w;
  w.tuned_channel = ch;
  return w;
}

PropagationParams no_loss() {
  PropagationParams p;
  p.background_loss_prob = 0.0;
  return p;
}

TEST(Reception, SingleFrameReceived) {
  const auto out = reception_outcome(no_loss(), frame(37, 0), -60.0, tuned(37), {}, 0.5);
  ASSERT_TRUE(std::holds_alternative<Received>(out));
  EXPECT_EQ(std::get<Received>(out).rssi_dbm, -60.0);
}

TEST(Reception, WrongChannel) {
  const auto out = reception_outcome(no_loss(), frame(37, 0), -60.0, tuned(38), {}, 0.5);
  ASSERT_TRUE(std::holds_alternative<Miss>(out));
  EXPECT_EQ(std::get<Miss>(out).reason, MissReason::WrongChannel);
}

TEST(Reception, IdleOrTransmittingIsNotScanning) {
  ReceiverWindow idle;
  auto out = reception_outcome(no_loss(), frame(37, 0), -60.0, idle, {}, 0.5);
  EXPECT_EQ(std::get<Miss>(out).reason, MissReason::NotScanning);
  ReceiverWindow busy = tuned(37);
  busy.transmitting = true;
  out = reception_outcome(no_loss(), frame(37, 0), -60.0, busy, {}, 0.5);
  EXPECT_EQ(std::get<Miss>(out).reason, MissReason::NotScanning);
}

TEST(Reception, BelowSensitivity) {
  const auto out = reception_outcome(no_loss(), frame(37, 0), -91.0, tuned(37), {}, 0.5);
  EXPECT_EQ(std::get<Miss>(out).reason, MissReason::BelowSensitivity);
}

TEST(Reception, BackgroundLossDraw) {
  PropagationParams p;
  p.background_loss_prob = 0.1;
  EXPECT_EQ(std::get<Miss>(reception_outcome(p, frame(37, 0), -50, tuned(37), {}, 0.05)).reason,
            MissReason::BackgroundLoss);
  EXPECT_TRUE(std::holds_alternative<Received>(
      reception_outcome(p, frame(37, 0), -50, tuned(37), {}, 0.1)));
}

TEST(Reception, OverlappingFramesBothCollide) {
  // Two transmitters on channel 37, overlapping by 100 µs at one receiver.
  const PropagationParams p = no_loss();
  const TransmissionRecord a = frame(37, 0, 1);
  const TransmissionRecord b = frame(37, a.airtime - 100, 2);
  const Interferer ia{37, a.start, a.end(), -70.0};
  const Interferer ib{37, b.start, b.end(), -55.0};
  const auto out_a = reception_outcome(p, a, -70.0, tuned(37), std::vector<Interferer>{ib}, 0.9);
  const auto out_b = reception_outcome(p, b, -55.0, tuned(37), std::vector<Interferer>{ia}, 0.9);
  EXPECT_EQ(std::get<Miss>(out_a).reason, MissReason::Collision);
  EXPECT_EQ(std::get<Miss>(out_b).reason, MissReason::Collision);
}

TEST(Reception, CaptureMarginLetsStrongFrameThrough) {
  PropagationParams p = no_loss();
  p.capture_margin_db = 6.0;
  const TransmissionRecord a = frame(37, 0, 1);
  const Interferer weak{37, 50, 400, -70.0};
  EXPECT_TRUE(std::holds_alternative<Received>(
      reception_outcome(p, a, -55.0, tuned(37), std::vector<Interferer>{weak}, 0.9)));
}

TEST(Reception, CollisionPredicateSymmetricInTime) {
  const PropagationParams p = no_loss();
  sim::RandomStream rs(2, 0, sim::StreamPurpose::Traffic);
  for (int i = 0; i < 2000; ++i) {
    const sim::SimTime s1 = rs.draw_range(0, 2000);
    const sim::SimTime s2 = rs.draw_range(0, 2000);
    const sim::SimTime e1 = s1 + 1 + rs.draw_range(0, 500);
    const sim::SimTime e2 = s2 + 1 + rs.draw_range(0, 500);
    const double r1 = -95.0 + static_cast<double>(rs.draw_range(0, 40));
    const double r2 = -95.0 + static_cast<double>(rs.draw_range(0, 40));
    const bool one = interferes(p, r1, Interferer{37, s2, e2, r2}, 37, s1, e1);
    const bool two = interferes(p, r2, Interferer{37, s1, e1, r1}, 37, s2, e2);
    const bool expected = overlaps(s1, e1, s2, e2);
    // Without capture, A is hit iff B overlaps it and B is above sensitivity.
    EXPECT_EQ(one, expected && r2 >= p.sensitivity_dbm);
    EXPECT_EQ(two, expected && r1 >= p.sensitivity_dbm);
  }
}

TEST(Reception, DifferentChannelsNeverInterfere) {
  EXPECT_FALSE(interferes(no_loss(), -60.0, Interferer{38, 0, 400, -40.0}, 37, 0, 400));
}

}  // namespace
}  // namespace meshsim::radio
