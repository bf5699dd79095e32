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

#include "meshsim/harness/library.hpp"

#include <algorithm>

#include "meshsim/scenario/topology.hpp"

namespace meshsim::harness {

namespace {

using transport::ExchangeMode;

std::vector<NodeSpec> plain_roster(const std::vector<radio::Position>& positions) {
  std::vector<NodeSpec> nodes;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    NodeSpec n;
    n.role = "relay";
    n.address = mesh::unicast_for_index(static_cast<std::uint32_t>(i));
    n.position = positions[i];
    nodes.push_back(std::move(n));
  }
  return nodes;
}

scenario::OfficeLayout office_layout(ScenarioConfig& cfg) {
  const double requested = cfg.propagation.floor_penalty_db;
  scenario::OfficeLayout layout = scenario::office_two_floor(cfg.seed, cfg.propagation);
  cfg.propagation.floor_penalty_db = layout.floor_penalty_db;
  cfg.calibration = {{"layout", "office_two_floor"},
                     {"requested_floor_penalty_db", requested},
                     {"floor_penalty_db", layout.floor_penalty_db},
                     {"hop_diameter", layout.hop_diameter},
                     {"attempts", layout.calibration_attempts},
                     {"controller_hops", layout.controller_hops},
                     {"single_hop", layout.single_hop},
                     {"multi_hop", layout.multi_hop},
                     {"relays", layout.relays}};
  cfg.nodes = plain_roster(layout.positions);
  cfg.nodes[layout.controller].role = "controller";
  // End devices do not relay; the five backbone nodes carry everything.
  for (sim::NodeId id : layout.single_hop) cfg.nodes[id].relay = false;
  for (sim::NodeId id : layout.multi_hop) cfg.nodes[id].relay = false;
  return layout;
}

void serve_cohort(ScenarioConfig& cfg, const std::vector<sim::NodeId>& ids, const std::string& cohort,
                  mesh::Address group) {
  cfg.cohort_groups[cohort] = group;
  for (sim::NodeId id : ids) {
    NodeSpec& n = cfg.nodes.at(id);
    n.role = "server";
    n.cohort = cohort;
    n.subscriptions.push_back(group);
  }
}

void office_testbed(ScenarioConfig& cfg) {
  const auto layout = office_layout(cfg);
  serve_cohort(cfg, layout.single_hop, "single_hop", kSingleHopGroup);
  serve_cohort(cfg, layout.multi_hop, "multi_hop", kMultiHopGroup);
}

void many_to_many(ScenarioConfig& cfg) {
  const auto layout = office_layout(cfg);
  cfg.nodes[layout.controller].role = "relay";
  for (std::size_t i = 0; i < layout.single_hop.size(); ++i) {
    NodeSpec& sender = cfg.nodes[layout.single_hop[i]];
    NodeSpec& receiver = cfg.nodes[layout.multi_hop[i]];
    sender.role = "sender";
    sender.peer = layout.multi_hop[i];
    receiver.role = "receiver";
    receiver.cohort = "receivers";
  }
}

void ext_vs_legacy(ScenarioConfig& cfg) {
  const auto layout = office_layout(cfg);
  NodeSpec& sink = cfg.nodes[layout.controller];
  sink.role = "receiver";
  sink.cohort = "sink";
  // Three desks next to the sink, so both bearers are compared over one hop.
  for (std::size_t i = 0; i < 3; ++i) {
    NodeSpec& sender = cfg.nodes[layout.single_hop[i]];
    sender.role = "sender";
    sender.peer = layout.controller;
  }
}

void mobility_testbed(ScenarioConfig& cfg) {
  const bool mobile = cfg.variant == "mobile";
  std::vector<radio::Position> start{{15.0, 15.0, 0}, {13.0, 15.0, 0}, {17.0, 15.0, 0},
                                     {15.0, 13.0, 0}, {15.0, 17.0, 0}};
  cfg.nodes = plain_roster(start);
  cfg.nodes[0].role = "controller";
  for (std::size_t i = 1; i < cfg.nodes.size(); ++i) {
    cfg.nodes[i].role = "server";
    cfg.nodes[i].cohort = "servers";
    cfg.nodes[i].subscriptions = {kServersGroup};
  }
  cfg.cohort_groups["servers"] = kServersGroup;
  if (!mobile) return;
  // Two active walkers covering the whole hall, two slower passive ones.
  cfg.nodes[1].mobility = scenario::BackAndForth{{13.0, 15.0, 0}, {2.0, 15.0, 0}, 0.5, true};
  cfg.nodes[2].mobility = scenario::RandomWaypoint{{0.0, 0.0, 30.0, 30.0}, 0.5, 0, {}, 0};
  cfg.nodes[3].mobility = scenario::RandomWaypoint{{7.0, 7.0, 23.0, 23.0}, 0.2, 0, {}, 0};
  cfg.nodes[4].mobility = scenario::BackAndForth{{15.0, 17.0, 0}, {15.0, 27.0, 0}, 0.2, true};
}

void coverage_demo(ScenarioConfig& cfg) {
  // Two clusters out of each other's range and a stray node between them.
  cfg.nodes = plain_roster({{0.0, 0.0, 0}, {2.0, 0.0, 0}, {20.0, 0.0, 0}, {22.0, 0.0, 0},
                            {11.0, 6.0, 0}});
  for (NodeSpec& n : cfg.nodes) {
    n.role = "member";
    n.subscriptions = {kBeaconGroup};
  }
  cfg.nodes[4].role = "mobile";
}

void formation_demo(ScenarioConfig& cfg) {
  cfg.nodes = plain_roster({{0.0, 0.0, 0}, {4.0, 0.0, 0}, {8.0, 0.0, 0}, {0.0, 4.0, 0},
                            {4.0, 4.0, 0}, {8.0, 4.0, 0}});
  const double fitness[] = {3.0, 7.0, 5.0, 2.0, 6.0, 4.0};
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    cfg.nodes[i].role = "candidate";
    cfg.nodes[i].fitness = fitness[i];
    cfg.nodes[i].cohort = "formation";
  }
  cfg.nodes[3].willing = false;
}

void line(ScenarioConfig& cfg) {
  cfg.nodes = plain_roster(scenario::line_positions(kLineNodes, kLineSpacingM));
  cfg.nodes[0].role = "source";
  for (std::size_t i = 1; i < cfg.nodes.size(); ++i) {
    cfg.nodes[i].role = "member";
    cfg.nodes[i].cohort = "line";
    cfg.nodes[i].subscriptions = {cfg.traffic.group};
  }
}

}  // namespace

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys{
      "office_two_floor", "group_unicast_vs_group", "many_to_many", "ext_vs_legacy",
      "mobility_vs_static", "coverage_demo", "formation_demo", "line"};
  return keys;
}

std::vector<std::string> scenario_variants(const std::string& key) {
  if (key == "group_unicast_vs_group") return {"unicast", "group"};
  if (key == "many_to_many") return {"default", "enhanced"};
  if (key == "ext_vs_legacy") return {"legacy", "extended"};
  if (key == "mobility_vs_static") return {"static", "mobile"};
  return {};
}

void apply_scenario_defaults(ScenarioConfig& cfg) {
  const std::string& key = cfg.scenario;
  if (key == "office_two_floor") {
    cfg.traffic.pattern = TrafficPattern::ControllerToCohorts;
  } else if (key == "group_unicast_vs_group") {
    cfg.traffic.pattern = TrafficPattern::ControllerToCohorts;
    cfg.traffic.mode = cfg.variant == "group" ? ExchangeMode::Group : ExchangeMode::Unicast;
  } else if (key == "many_to_many") {
    cfg.traffic.pattern = TrafficPattern::Pairs;
    if (cfg.variant == "enhanced") {
      cfg.scan.scan_interval = 1'000'000;
      cfg.scan.scan_window = 1'000'000;
      cfg.adv.adv_interval = 10'000;
    }
  } else if (key == "ext_vs_legacy") {
    cfg.traffic.pattern = TrafficPattern::Pairs;
    cfg.exchange.message_size = 50;
    cfg.ext.enabled = cfg.variant == "extended";
  } else if (key == "mobility_vs_static") {
    cfg.traffic.pattern = TrafficPattern::ControllerToCohorts;
  } else if (key == "coverage_demo") {
    cfg.traffic.pattern = TrafficPattern::Coverage;
    cfg.traffic.iterations = 200;
    cfg.traffic.period = cfg.coverage.beacon_period;
    cfg.traffic.drain = 1'000'000;
    cfg.propagation.background_loss_prob = 0.0;
    cfg.propagation.shadowing_sigma_db = 0.0;
    cfg.cohort_groups["beacons"] = kBeaconGroup;
  } else if (key == "formation_demo") {
    cfg.traffic.pattern = TrafficPattern::Formation;
    cfg.traffic.mode = ExchangeMode::Group;
    cfg.traffic.iterations = 20;
  } else if (key == "line") {
    cfg.traffic.pattern = TrafficPattern::Flood;
    cfg.traffic.mode = ExchangeMode::Group;
    cfg.traffic.iterations = 3;
    cfg.traffic.period = 5'000'000;
    cfg.traffic.drain = 5'000'000;
    cfg.ttl = mesh::kMaxTtl;
    cfg.propagation.background_loss_prob = 0.0;
    cfg.propagation.shadowing_sigma_db = 0.0;
    cfg.rssi_period = 5'000'000;
  }
}

void build_roster(ScenarioConfig& cfg) {
  const std::string& key = cfg.scenario;
  if (key == "office_two_floor") {
    office_testbed(cfg);
  } else if (key == "group_unicast_vs_group") {
    office_testbed(cfg);
  } else if (key == "many_to_many") {
    many_to_many(cfg);
  } else if (key == "ext_vs_legacy") {
    ext_vs_legacy(cfg);
  } else if (key == "mobility_vs_static") {
    mobility_testbed(cfg);
  } else if (key == "coverage_demo") {
    coverage_demo(cfg);
  } else if (key == "formation_demo") {
    formation_demo(cfg);
  } else if (key == "line") {
    line(cfg);
  }
}

}  // namespace meshsim::harness
