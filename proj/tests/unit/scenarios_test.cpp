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
#include <map>

#include "meshsim/scenario/coverage.hpp"
#include "meshsim/scenario/formation.hpp"
#include "meshsim/scenario/mobility.hpp"
#include "meshsim/scenario/topology.hpp"
#include "test_support.hpp"

namespace meshsim::scenario {
namespace {

using radio::Position;
using testing::lossless;
using testing::node_at;

double planar(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

TEST(Mobility, StaticNeverMoves) {
  MobilityModel m = Static{};
  sim::RandomStream rs(1, 0, sim::StreamPurpose::Mobility);
  const Position p{3, 4, 1};
  EXPECT_EQ(step_mobility(m, p, 5'000'000, rs), p);
}

TEST(Mobility, BackAndForthOneSecond) {
  MobilityModel m = BackAndForth{{0, 0, 0}, {10, 0, 0}, 1.0, true};
  sim::RandomStream rs(1, 0, sim::StreamPurpose::Mobility);
  const Position p = step_mobility(m, {0, 0, 0}, 1'000'000, rs);
  EXPECT_NEAR(p.x, 1.0, 1e-12);
  EXPECT_NEAR(p.y, 0.0, 1e-12);
}

TEST(Mobility, BackAndForthTurnsAround) {
  MobilityModel m = BackAndForth{{0, 0, 0}, {2, 0, 0}, 1.0, true};
  sim::RandomStream rs(1, 0, sim::StreamPurpose::Mobility);
  Position p{0, 0, 0};
  p = step_mobility(m, p, 3'000'000, rs);  // 2 m out, 1 m back
  EXPECT_NEAR(p.x, 1.0, 1e-9);
  EXPECT_FALSE(std::get<BackAndForth>(m).toward_p1);
}

TEST(Mobility, RandomWaypointStaysInsideBoundsWithoutTeleporting) {
  const Bounds box{0, 0, 10, 10};
  MobilityModel m = RandomWaypoint{box, 0.5, 0, {}, 0};
  sim::RandomStream rs(9, 3, sim::StreamPurpose::Mobility);
  Position p{5, 5, 0};
  const sim::Duration dt = 100'000;
  const double max_step = 0.5 * 0.1 + 1e-9;
  for (int i = 0; i < 100'000; ++i) {
    const Position next = step_mobility(m, p, dt, rs);
    ASSERT_TRUE(box.contains(next)) << "step " << i;
    ASSERT_LE(planar(p, next), max_step) << "step " << i;
    p = next;
  }
}

TEST(Mobility, Validation) {
  EXPECT_FALSE(validate(MobilityModel{Static{}}));
  EXPECT_TRUE(validate(MobilityModel{RandomWaypoint{{5, 5, 1, 1}, 0.5, 0, {}, 0}}));
  EXPECT_TRUE(validate(MobilityModel{BackAndForth{{0, 0, 0}, {1, 0, 0}, -1.0, true}}));
  EXPECT_EQ(mobility_name(MobilityModel{Static{}}), "static");
}

TEST(Topology, HopDistancesOnLine) {
  // At the default exponent 10 m links are usable and 20 m ones are not.
  const auto g = link_graph(line_positions(5, 10.0), lossless(), 1);
  const std::vector<int> d = hop_distances(g, 0);
  EXPECT_EQ(d, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(hop_diameter(g), 4);
}

TEST(Topology, DisconnectedHasNoDiameter) {
  radio::PropagationParams p = lossless();
  const auto g = link_graph({{0, 0, 0}, {500, 0, 0}}, p, 1);
  EXPECT_FALSE(hop_diameter(g));
  EXPECT_EQ(hop_distances(g, 0)[1], -1);
}

TEST(Office, TwentyNodesOnTwoFloorsDiameterFour) {
  const OfficeLayout l = office_two_floor(1, radio::PropagationParams{});
  ASSERT_EQ(l.positions.size(), 20u);
  int upper = 0;
  for (const Position& p : l.positions) upper += p.floor;
  EXPECT_EQ(upper, 10);
  EXPECT_EQ(l.hop_diameter, kOfficeTargetDiameter);
  EXPECT_EQ(l.single_hop.size(), 7u);
  EXPECT_EQ(l.multi_hop.size(), 7u);
  for (sim::NodeId n : l.single_hop) EXPECT_EQ(l.controller_hops[n], 1);
  for (sim::NodeId n : l.multi_hop) EXPECT_GE(l.controller_hops[n], 2);
}

TEST(Office, DeterministicPerSeed) {
  const OfficeLayout a = office_two_floor(3, radio::PropagationParams{});
  const OfficeLayout b = office_two_floor(3, radio::PropagationParams{});
  EXPECT_EQ(a.positions, b.positions);
  EXPECT_EQ(a.floor_penalty_db, b.floor_penalty_db);
}

TEST(Reachability, ForwardersMatter) {
  const auto g = link_graph(line_positions(4, 10.0), lossless(), 1);
  EXPECT_TRUE(reachable_via(g, 0, {1, 2}, {3}));
  EXPECT_EQ(unreachable_via(g, 0, {1}, {3}), std::vector<sim::NodeId>{3});
}

NeighborTable table_with(std::initializer_list<std::tuple<sim::NodeId, double, std::optional<double>>> rows) {
  NeighborTable t;
  for (const auto& [id, rssi, echo] : rows) t.heard(id, rssi, echo, 0);
  return t;
}

TEST(CoverageTick, EnoughMutualNeighboursStays) {
  const NeighborTable t = table_with({{1, -60, -62}, {2, -70, -71}});
  const auto d = coverage_tick({0, 0, 0}, t, CoverageParams{}, [](sim::NodeId) { return Position{}; });
  EXPECT_TRUE(std::holds_alternative<Stay>(d));
}

TEST(CoverageTick, MovesTowardStrongestWhenShort) {
  const NeighborTable t = table_with({{1, -60, -62}, {2, -85, std::nullopt}});
  std::map<sim::NodeId, Position> where{{1, {10, 0, 0}}, {2, {0, 10, 0}}};
  const auto d = coverage_tick({0, 0, 0}, t, CoverageParams{}, [&](sim::NodeId id) { return where[id]; });
  ASSERT_TRUE(std::holds_alternative<Move>(d));
  const Move mv = std::get<Move>(d);
  EXPECT_EQ(mv.toward, 1u);
  EXPECT_NEAR(mv.dx, 0.25, 1e-12);
  EXPECT_NEAR(mv.dy, 0.0, 1e-12);
}

TEST(CoverageTick, EmptyTableStays) {
  EXPECT_TRUE(std::holds_alternative<Stay>(
      coverage_tick({0, 0, 0}, NeighborTable{}, CoverageParams{}, [](sim::NodeId) { return Position{}; })));
}

TEST(CoverageTick, RepeatedMovesCloseTheGapMonotonically) {
  const NeighborTable t = table_with({{1, -60, std::nullopt}});
  const Position target{3, 4, 0};
  Position self{0, 0, 0};
  double gap = planar(self, target);
  for (int i = 0; i < 200; ++i) {
    const auto d = coverage_tick(self, t, CoverageParams{}, [&](sim::NodeId) { return target; });
    if (std::holds_alternative<Stay>(d)) break;
    const Move mv = std::get<Move>(d);
    self.x += mv.dx;
    self.y += mv.dy;
    const double next = planar(self, target);
    ASSERT_LT(next, gap);
    gap = next;
  }
  EXPECT_LT(gap, 0.01);
}

TEST(NeighborTable, ExpiresAfterThreePeriods) {
  NeighborTable t;
  t.heard(1, -60, -60, 0);
  t.heard(2, -60, -60, 2'500'000);
  t.expire(3'500'000, 1'000'000);
  EXPECT_FALSE(t.entries().contains(1));
  EXPECT_TRUE(t.entries().contains(2));
}

TEST(SelectLeader, ArgmaxAndLowestIdOnTies) {
  EXPECT_EQ(select_leader({{1, 0.3}, {2, 0.9}, {3, 0.5}}), 2u);
  EXPECT_EQ(select_leader({{4, 0.9}, {2, 0.9}, {3, 0.1}}), 2u);
  EXPECT_FALSE(select_leader({}));
}

TEST(SelectLeader, InvariantUnderPositiveScaling) {
  std::map<sim::NodeId, double> a{{1, 0.3}, {2, 0.9}, {3, 0.5}, {7, 0.89}};
  std::map<sim::NodeId, double> b;
  for (const auto& [id, f] : a) b[id] = f * 1000.0;
  EXPECT_EQ(select_leader(a), select_leader(b));
}

struct Cluster {
  net::MeshNetwork net;
  transport::AccessRouter router;

  explicit Cluster(std::size_t n, std::uint64_t seed = 1) : net(seed, lossless()), router(net) {
    for (std::size_t i = 0; i < n; ++i) {
      net.add_node(node_at(static_cast<std::uint32_t>(i), {static_cast<double>(i % 3) * 2.0,
                                                           static_cast<double>(i / 3) * 2.0, 0}));
    }
  }
};

TEST(Election, AllMembersAgreeWithoutLoss) {
  Cluster c(5);
  LeaderElection e(c.router, ElectionParams{});
  for (sim::NodeId n = 0; n < 5; ++n) e.add_member(n);
  e.add_candidate(1, 0.4);
  e.add_candidate(3, 0.8);
  e.add_candidate(4, 0.6);
  e.start(1000);
  c.net.sim().run(sim::kForever);
  ASSERT_TRUE(e.finished());
  EXPECT_EQ(e.result().leader, 3u);
  EXPECT_EQ(e.result().disagreements, 0u);
  for (const auto& [m, choice] : e.result().choice) EXPECT_EQ(choice, 3u) << "member " << m;
}

TEST(Election, LostCandidacyCausesDisagreement) {
  Cluster c(5);
  LeaderElection e(c.router, ElectionParams{});
  for (sim::NodeId n = 0; n < 5; ++n) e.add_member(n);
  e.add_candidate(1, 0.4);
  e.add_candidate(3, 0.8);
  // Node 0 never hears anything originated by node 3, relayed or not.
  const mesh::Address three = c.net.node(3).config.unicast;
  c.net.force_drop = [three](sim::NodeId rx, const radio::TransmissionRecord& r) {
    return rx == 0 && r.pdu && r.pdu->src == three;
  };
  e.start(1000);
  c.net.sim().run(sim::kForever);
  EXPECT_EQ(e.result().leader, 3u);
  EXPECT_EQ(e.result().choice.at(0), 1u);
  EXPECT_GE(e.result().disagreements, 1u);
}

TEST(Recruitment, ConfirmsFirstKVolunteers) {
  Cluster c(6);
  Recruitment r(c.router, RecruitParams{});
  r.set_leader(0);
  r.add_member(1, true, 900'000);
  r.add_member(2, true, 100'000);
  r.add_member(3, false);
  r.add_member(4, true, 400'000);
  r.add_member(5, true, 5'000'000);  // well past the deadline
  r.start(1000);
  c.net.sim().run(sim::kForever);
  ASSERT_TRUE(r.finished());
  EXPECT_EQ(r.result().confirmed, (std::vector<sim::NodeId>{2, 4}));
  EXPECT_EQ(r.confirms_sent(), 2u);
  EXPECT_FALSE(r.result().partial);
  EXPECT_EQ(r.joined(), (std::set<sim::NodeId>{2, 4}));
  EXPECT_FALSE(r.result().late.empty());
}

TEST(Recruitment, PartialWhenTooFewVolunteer) {
  Cluster c(4);
  RecruitParams p;
  p.k = 3;
  Recruitment r(c.router, p);
  r.set_leader(0);
  r.add_member(1, true, 10'000);
  r.add_member(2, false);
  r.add_member(3, false);
  r.start(1000);
  c.net.sim().run(sim::kForever);
  EXPECT_TRUE(r.result().partial);
  EXPECT_EQ(r.result().confirmed, std::vector<sim::NodeId>{1});
}

TEST(Recruitment, RejectsBadParameters) {
  Cluster c(2);
  RecruitParams p;
  p.k = 0;
  EXPECT_THROW(Recruitment(c.router, p), std::invalid_argument);
  Recruitment r(c.router, RecruitParams{});
  EXPECT_THROW(r.start(0), std::logic_error);
}

}  // namespace
}  // namespace meshsim::scenario
