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

#include "meshsim/scenario/topology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <sstream>

#include "meshsim/sim/random.hpp"

namespace meshsim::scenario {

namespace {

struct Anchor {
  double x;
  double y;
};

// Ground floor: controller by the west wall, its seven end devices
// around it, then two relays stepping east toward the stairwell.
constexpr std::array<Anchor, 10> kGroundFloor{{{0.5, 7.5},
                                               {3.0, 3.0},
                                               {3.0, 12.0},
                                               {5.0, 5.5},
                                               {5.0, 9.5},
                                               {6.5, 2.5},
                                               {6.5, 12.5},
                                               {2.5, 10.0},
                                               {8.5, 7.5},
                                               {17.0, 7.5}}};

// Upper floor, east half only: three relays, then seven end devices.
constexpr std::array<Anchor, 10> kUpperFloor{{{17.0, 7.5},
                                              {16.5, 3.0},
                                              {16.5, 12.0},
                                              {19.5, 1.0},
                                              {19.5, 14.0},
                                              {13.5, 1.5},
                                              {13.5, 13.5},
                                              {19.5, 9.5},
                                              {14.0, 7.5},
                                              {17.0, 5.0}}};

constexpr sim::NodeId kController = 0;
constexpr std::array<sim::NodeId, 7> kSingleHop{1, 2, 3, 4, 5, 6, 7};
constexpr std::array<sim::NodeId, 5> kRelays{8, 9, 10, 11, 12};
constexpr std::array<sim::NodeId, 7> kMultiHop{13, 14, 15, 16, 17, 18, 19};

constexpr double kJitterM = 0.75;

// The controller and relays are installed at fixed spots; desks (the end
// devices) move around their anchors from seed to seed.
std::vector<radio::Position> office_positions(std::uint64_t seed) {
  sim::RandomStream jitter(seed, 0, sim::StreamPurpose::Topology);
  auto fixed = [](sim::NodeId id) {
    return id == kController ||
           std::find(kRelays.begin(), kRelays.end(), id) != kRelays.end();
  };
  std::vector<radio::Position> out;
  auto place = [&](const Anchor& a, int floor) {
    const auto id = static_cast<sim::NodeId>(out.size());
    if (fixed(id)) return radio::Position{a.x, a.y, floor};
    const double dx = (jitter.next_double() * 2.0 - 1.0) * kJitterM;
    const double dy = (jitter.next_double() * 2.0 - 1.0) * kJitterM;
    return radio::Position{std::clamp(a.x + dx, 0.0, kOfficeFloorWidthM),
                           std::clamp(a.y + dy, 0.0, kOfficeFloorDepthM), floor};
  };
  for (const Anchor& a : kGroundFloor) out.push_back(place(a, 0));
  for (const Anchor& a : kUpperFloor) out.push_back(place(a, 1));
  return out;
}

}  // namespace

LinkGraph link_graph(const std::vector<radio::Position>& positions,
                     const radio::PropagationParams& params, std::uint64_t seed) {
  LinkGraph g;
  g.adjacency.resize(positions.size());
  for (sim::NodeId i = 0; i < positions.size(); ++i) {
    for (sim::NodeId j = i + 1; j < positions.size(); ++j) {
      const double shadow = radio::link_shadow_db(seed, i, j, params.shadowing_sigma_db);
      if (radio::link_rssi(params, positions[i], positions[j], shadow) >= params.sensitivity_dbm) {
        g.adjacency[i].push_back(j);
        g.adjacency[j].push_back(i);
      }
    }
  }
  return g;
}

std::vector<int> hop_distances(const LinkGraph& graph, sim::NodeId source) {
  std::vector<int> dist(graph.size(), -1);
  std::deque<sim::NodeId> frontier{source};
  dist.at(source) = 0;
  while (!frontier.empty()) {
    const sim::NodeId u = frontier.front();
    frontier.pop_front();
    for (sim::NodeId v : graph.adjacency[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

std::optional<int> hop_diameter(const LinkGraph& graph) {
  int best = 0;
  for (sim::NodeId s = 0; s < graph.size(); ++s) {
    for (int d : hop_distances(graph, s)) {
      if (d < 0) return std::nullopt;
      best = std::max(best, d);
    }
  }
  return best;
}

std::vector<sim::NodeId> unreachable_via(const LinkGraph& graph, sim::NodeId source,
                                         const std::vector<sim::NodeId>& forwarders,
                                         const std::vector<sim::NodeId>& targets) {
  std::vector<bool> forwards(graph.size(), false);
  for (sim::NodeId f : forwarders) forwards.at(f) = true;
  forwards.at(source) = true;
  std::vector<bool> seen(graph.size(), false);
  std::deque<sim::NodeId> frontier{source};
  seen[source] = true;
  while (!frontier.empty()) {
    const sim::NodeId u = frontier.front();
    frontier.pop_front();
    if (!forwards[u]) continue;  // hears, but does not pass it on
    for (sim::NodeId v : graph.adjacency[u]) {
      if (!seen[v]) {
        seen[v] = true;
        frontier.push_back(v);
      }
    }
  }
  std::vector<sim::NodeId> missing;
  for (sim::NodeId t : targets) {
    if (!seen.at(t)) missing.push_back(t);
  }
  return missing;
}

bool reachable_via(const LinkGraph& graph, sim::NodeId source,
                   const std::vector<sim::NodeId>& forwarders,
                   const std::vector<sim::NodeId>& targets) {
  return unreachable_via(graph, source, forwarders, targets).empty();
}

OfficeLayout office_two_floor(std::uint64_t seed, const radio::PropagationParams& base) {
  OfficeLayout layout;
  layout.positions = office_positions(seed);
  layout.controller = kController;
  layout.single_hop.assign(kSingleHop.begin(), kSingleHop.end());
  layout.multi_hop.assign(kMultiHop.begin(), kMultiHop.end());
  layout.relays.assign(kRelays.begin(), kRelays.end());

  std::vector<double> offsets{0.0};
  for (double k = kOfficeFloorPenaltyStepDb; k <= kOfficeFloorPenaltySearchDb + 1e-9;
       k += kOfficeFloorPenaltyStepDb) {
    offsets.push_back(k);
    offsets.push_back(-k);
  }

  std::vector<sim::NodeId> end_devices = layout.single_hop;
  end_devices.insert(end_devices.end(), layout.multi_hop.begin(), layout.multi_hop.end());

  std::ostringstream tried;
  for (double off : offsets) {
    radio::PropagationParams p = base;
    p.floor_penalty_db = base.floor_penalty_db + off;
    ++layout.calibration_attempts;
    const LinkGraph g = link_graph(layout.positions, p, seed);
    const auto diameter = hop_diameter(g);
    tried << ' ' << p.floor_penalty_db << "->" << (diameter ? std::to_string(*diameter) : "x");
    if (diameter != kOfficeTargetDiameter) continue;

    const std::vector<int> hops = hop_distances(g, layout.controller);
    std::string misplaced;
    for (sim::NodeId n : layout.single_hop) {
      if (hops[n] != 1) misplaced += ' ' + std::to_string(n) + '@' + std::to_string(hops[n]);
    }
    for (sim::NodeId n : layout.multi_hop) {
      if (hops[n] < 3) misplaced += ' ' + std::to_string(n) + '@' + std::to_string(hops[n]);
    }
    if (!misplaced.empty()) {
      tried << "(hops" << misplaced << ')';
      continue;
    }
    if (const auto cut = unreachable_via(g, layout.controller, layout.relays, end_devices);
        !cut.empty()) {
      tried << "(cut";
      for (sim::NodeId n : cut) tried << ' ' << n;
      tried << ')';
      continue;
    }
    layout.floor_penalty_db = p.floor_penalty_db;
    layout.hop_diameter = *diameter;
    layout.controller_hops = hops;
    return layout;
  }
  throw CalibrationFault("office_two_floor: no floor penalty within +/-5 dB of " +
                         std::to_string(base.floor_penalty_db) +
                         " gives a usable layout with hop diameter 4 (seed " +
                         std::to_string(seed) + "; tried" + tried.str() + ")");
}

std::vector<radio::Position> line_positions(std::size_t count, double spacing_m) {
  std::vector<radio::Position> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back({static_cast<double>(i) * spacing_m, 0.0, 0});
  return out;
}

}  // namespace meshsim::scenario
