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

#include <string>
#include <vector>

#include "meshsim/sim/engine.hpp"
#include "meshsim/sim/random.hpp"

namespace meshsim::sim {
namespace {

Event at(SimTime t, int* tag_out = nullptr, int tag = 0) {
  Event e;
  e.fire_at = t;
  if (tag_out) e.action = [tag_out, tag] { *tag_out = tag; };
  return e;
}

TEST(EventQueue, SingleEventPopsBack) {
  EventQueue q;
  q.push(at(100));
  ASSERT_EQ(q.size(), 1u);
  Event e = q.pop();
  EXPECT_EQ(e.fire_at, 100u);
  EXPECT_TRUE(q.empty());
}

TEST(EventQueue, EqualTimesPopInInsertionOrder) {
  EventQueue q;
  int seen = 0;
  q.push(at(50, &seen, 1));
  q.push(at(50, &seen, 2));
  Event first = q.pop();
  first.action();
  EXPECT_EQ(seen, 1);
  Event second = q.pop();
  second.action();
  EXPECT_EQ(seen, 2);
  EXPECT_LT(first.tiebreak_seq, second.tiebreak_seq);
}

TEST(EventQueue, OrdersByTimeThenSequence) {
  EventQueue q;
  for (SimTime t : {30u, 10u, 20u, 10u, 30u}) q.push(at(t));
  std::vector<std::pair<SimTime, std::uint64_t>> popped;
  while (!q.empty()) {
    Event e = q.pop();
    popped.emplace_back(e.fire_at, e.tiebreak_seq);
  }
  ASSERT_EQ(popped.size(), 5u);
  for (std::size_t i = 1; i < popped.size(); ++i) EXPECT_LT(popped[i - 1], popped[i]);
}

TEST(Simulator, SchedulingInThePastFaults) {
  Simulator sim;
  sim.schedule(20, kGlobalTarget, EventKind::Generic, [] {});
  sim.run(20);
  ASSERT_EQ(sim.now(), 20u);
  EXPECT_THROW(sim.schedule(10, kGlobalTarget, EventKind::Generic, [] {}), SchedulingFault);
  try {
    sim.schedule(10, kGlobalTarget, EventKind::Generic, [] {});
  } catch (const SchedulingFault& f) {
    EXPECT_NE(std::string(f.what()).find("fire_at=10"), std::string::npos);
  }
}

TEST(Simulator, EmptyQueueProcessesNothing) {
  Simulator sim;
  const RunSummary s = sim.run(1000);
  EXPECT_EQ(s.events_processed, 0u);
  EXPECT_EQ(s.clock, 1000u);
}

TEST(Simulator, OneEventAdvancesClockThenHorizon) {
  Simulator sim;
  SimTime seen_at = 0;
  sim.schedule(500, kGlobalTarget, EventKind::Generic, [&] { seen_at = sim.now(); });
  const RunSummary s = sim.run(1000);
  EXPECT_EQ(s.events_processed, 1u);
  EXPECT_EQ(seen_at, 500u);
  EXPECT_EQ(s.clock, 1000u);
}

TEST(Simulator, EventsBeyondHorizonStayQueued) {
  Simulator sim;
  int fired = 0;
  sim.schedule(10, 0, EventKind::Timer, [&] { ++fired; });
  sim.schedule(2000, 0, EventKind::Timer, [&] { ++fired; });
  sim.run(1000);
  EXPECT_EQ(fired, 1);
  EXPECT_EQ(sim.pending(), 1u);
  sim.run(kForever);
  EXPECT_EQ(fired, 2);
  EXPECT_EQ(sim.pending(), 0u);
}

TEST(Simulator, ClockNeverRunsBackwards) {
  Simulator sim;
  SimTime last = 0;
  bool monotone = true;
  RandomStream rs(7, 0, StreamPurpose::Traffic);
  std::function<void()> spawn = [&] {
    if (sim.now() < last) monotone = false;
    last = sim.now();
    if (sim.processed() < 5000) {
      sim.schedule_in(rs.draw_range(0, 50), 0, EventKind::Generic, spawn);
      sim.schedule_in(rs.draw_range(0, 50), 1, EventKind::Generic, [&] {
        if (sim.now() < last) monotone = false;
        last = sim.now();
      });
    }
  };
  sim.schedule(0, 0, EventKind::Generic, spawn);
  sim.run(kForever);
  EXPECT_TRUE(monotone);
  EXPECT_EQ(sim.pending(), 0u);
}

TEST(Simulator, RequestStopHaltsAfterCurrentEvent) {
  Simulator sim;
  int fired = 0;
  sim.schedule(1, 0, EventKind::Generic, [&] {
    ++fired;
    sim.request_stop();
  });
  sim.schedule(2, 0, EventKind::Generic, [&] { ++fired; });
  sim.run(100);
  EXPECT_EQ(fired, 1);
  EXPECT_EQ(sim.now(), 1u);
}

// Builds a little self-scheduling workload whose shape depends on the seed.
std::vector<Simulator::LogEntry> trace(std::uint64_t seed) {
  Simulator sim;
  sim.enable_event_log(true);
  RandomStream rs(seed, 3, StreamPurpose::AdvDelay);
  std::function<void(NodeId)> tick = [&](NodeId n) {
    if (sim.now() > 100'000) return;
    sim.schedule_in(1000 + rs.draw_range(0, 500), n, EventKind::AdvEventStart,
                    [&, n] { tick(n); });
  };
  for (NodeId n = 0; n < 4; ++n) sim.schedule(0, n, EventKind::AdvEventStart, [&, n] { tick(n); });
  sim.run(kForever);
  return sim.event_log();
}

TEST(Simulator, IdenticalSeedsGiveIdenticalEventLogs) {
  EXPECT_EQ(trace(11), trace(11));
  EXPECT_NE(trace(11), trace(12));
}

}  // namespace
}  // namespace meshsim::sim
