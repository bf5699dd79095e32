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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "meshsim/radio/propagation.hpp"
#include "meshsim/sim/engine.hpp"

namespace meshsim::scenario {

/// Undirected link graph: an edge wherever link RSSI (with the run's frozen
/// shadowing) reaches sensitivity.
struct LinkGraph {
  std::vector<std::vector<sim::NodeId>> adjacency;

  [[nodiscard]] std::size_t size() const { return adjacency.size(); }
};

LinkGraph link_graph(const std::vector<radio::Position>& positions,
                     const radio::PropagationParams& params, std::uint64_t seed);

/// BFS hop counts from `source`; -1 marks unreachable nodes.
std::vector<int> hop_distances(const LinkGraph& graph, sim::NodeId source);

/// Longest shortest path, or nullopt if the graph is disconnected.
std::optional<int> hop_diameter(const LinkGraph& graph);

class CalibrationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kOfficeFloorWidthM = 20.0;
inline constexpr double kOfficeFloorDepthM = 15.0;
inline constexpr int kOfficeTargetDiameter = 4;
inline constexpr double kOfficeFloorPenaltySearchDb = 5.0;
inline constexpr double kOfficeFloorPenaltyStepDb = 0.5;

struct OfficeLayout {
  std::vector<radio::Position> positions;  // 20 nodes, 10 per floor
  sim::NodeId controller = 0;
  std::vector<sim::NodeId> single_hop;  // 7 end devices next to the controller
  std::vector<sim::NodeId> multi_hop;   // 7 end devices on the upper floor
  std::vector<sim::NodeId> relays;      // backbone carrying traffic between floors
  std::vector<int> controller_hops;
  double floor_penalty_db = 0.0;  // value the calibration settled on
  int hop_diameter = 0;
  int calibration_attempts = 0;
};

/// Deterministic 20-node, two-floor layout for `seed`: a controller with
/// seven end devices on the ground floor, seven end devices upstairs and
/// five relays linking them. The floor penalty is searched within +/-5 dB
/// of `base.floor_penalty_db` (nearest first) until the hop diameter is 4,
/// every ground-floor end device is one hop from the controller, every
/// upstairs one is at least three hops away, and each end device has a
/// relay (or the controller) as a neighbour. Throws CalibrationFault when
/// no candidate qualifies.
OfficeLayout office_two_floor(std::uint64_t seed, const radio::PropagationParams& base);

/// Members of `targets` that `source` cannot reach when only `source` and
/// `forwarders` pass traffic on.
std::vector<sim::NodeId> unreachable_via(const LinkGraph& graph, sim::NodeId source,
                                         const std::vector<sim::NodeId>& forwarders,
                                         const std::vector<sim::NodeId>& targets);

/// True when every node in `targets` is reachable from `source` through
/// intermediate nodes drawn only from `forwarders`.
bool reachable_via(const LinkGraph& graph, sim::NodeId source,
                   const std::vector<sim::NodeId>& forwarders,
                   const std::vector<sim::NodeId>& targets);

/// Straight line along x with constant spacing, all on floor 0.
std::vector<radio::Position> line_positions(std::size_t count, double spacing_m);

}  // namespace meshsim::scenario
