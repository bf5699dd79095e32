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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "meshsim/radio/propagation.hpp"
#include "meshsim/sim/engine.hpp"
#include "meshsim/transport/access.hpp"

namespace meshsim::scenario {

struct CoverageParams {
  double rssi_threshold_dbm = -80.0;
  int target_degree = 2;
  sim::Duration beacon_period = 1'000'000;
  double move_step_m = 0.25;

  [[nodiscard]] std::optional<std::string> validate() const;
};

struct NeighborEntry {
  sim::NodeId id = 0;
  double last_rssi_heard = 0.0;
  std::optional<double> rssi_they_heard_me;
  sim::SimTime last_seen = 0;
};

/// Beacon-fed view of a node's one-hop neighbourhood.
class NeighborTable {
 public:
  /// A beacon from `id` arrived at `rssi`, optionally echoing how strongly
  /// `id` hears us.
  void heard(sim::NodeId id, double rssi, std::optional<double> echoed, sim::SimTime now);
  /// Drops entries not refreshed within three beacon periods.
  void expire(sim::SimTime now, sim::Duration beacon_period);

  /// Neighbours whose weaker direction still reaches `threshold`.
  [[nodiscard]] int mutual_degree(double threshold) const;
  [[nodiscard]] std::optional<NeighborEntry> strongest() const;
  [[nodiscard]] const std::map<sim::NodeId, NeighborEntry>& entries() const { return entries_; }
  [[nodiscard]] bool empty() const { return entries_.empty(); }

 private:
  std::map<sim::NodeId, NeighborEntry> entries_;
};

struct Stay {};
struct Move {
  sim::NodeId toward = 0;
  double dx = 0.0;
  double dy = 0.0;
};
using CoverageDecision = std::variant<Stay, Move>;

/// One controller step: stay when the mutual degree reaches k or nothing is
/// heard; otherwise step toward the strongest neighbour, never overshooting.
CoverageDecision coverage_tick(const radio::Position& self, const NeighborTable& table,
                               const CoverageParams& params,
                               const std::function<radio::Position(sim::NodeId)>& position_of);

/// Beacon exchange plus movement for a set of nodes on one network.
class CoverageController {
 public:
  CoverageController(transport::AccessRouter& router, CoverageParams params, mesh::Address group);

  /// `mobile` nodes run the controller; every participant beacons.
  void add(sim::NodeId node, bool mobile);
  void start(sim::SimTime at);

  [[nodiscard]] const NeighborTable& table(sim::NodeId node) const { return tables_.at(node); }
  [[nodiscard]] int degree(sim::NodeId node) const;
  [[nodiscard]] std::uint64_t ticks() const { return ticks_; }
  [[nodiscard]] std::uint64_t moves() const { return moves_; }
  /// First tick index at which every mobile node had degree >= k.
  [[nodiscard]] std::optional<std::uint64_t> converged_at() const { return converged_at_; }

 private:
  void beacon(sim::NodeId node);
  void tick();

  transport::AccessRouter& router_;
  CoverageParams params_;
  mesh::Address group_;
  std::vector<sim::NodeId> members_;
  std::vector<sim::NodeId> mobile_;
  std::map<sim::NodeId, NeighborTable> tables_;
  std::uint64_t ticks_ = 0;
  std::uint64_t moves_ = 0;
  std::uint32_t beacon_seq_ = 0;
  std::optional<std::uint64_t> converged_at_;
};

}  // namespace meshsim::scenario
