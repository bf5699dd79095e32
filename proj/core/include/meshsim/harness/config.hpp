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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "meshsim/bearer/params.hpp"
#include "meshsim/mesh/address.hpp"
#include "meshsim/radio/propagation.hpp"
#include "meshsim/scenario/coverage.hpp"
#include "meshsim/scenario/formation.hpp"
#include "meshsim/scenario/mobility.hpp"
#include "meshsim/transport/access.hpp"
#include "meshsim/transport/segmentation.hpp"

namespace meshsim::harness {

/// Every problem found while reading a config, one "path: message" each.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  [[nodiscard]] const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

enum class TrafficPattern : std::uint8_t {
  ControllerToCohorts,  // controller exchanges with every server, per cohort
  Pairs,                // each sender exchanges with its peer
  Flood,                // a source publishes to a group, no statuses
  Coverage,             // beaconing plus coverage movement
  Formation,            // election, recruitment, then formation commands
};

std::string_view to_string(TrafficPattern p);
std::optional<TrafficPattern> parse_pattern(std::string_view text);

struct TrafficSpec {
  TrafficPattern pattern = TrafficPattern::ControllerToCohorts;
  transport::ExchangeMode mode = transport::ExchangeMode::Unicast;
  std::uint32_t iterations = 100;
  sim::Duration period = 1'000'000;
  sim::Duration start = 1'000'000;
  /// Quiet time after the last iteration before the run stops.
  sim::Duration drain = 15'000'000;
  /// Flood destination.
  mesh::Address group{0xC0FF};
  /// Acked unicast exchanges a client keeps open at once; later ones wait
  /// in FIFO order. 0 means no limit.
  std::uint32_t max_outstanding = 0;
};

struct NodeSpec {
  std::string role;  // controller, server, sender, receiver, source, member, relay, mobile, candidate
  mesh::Address address;
  radio::Position position;
  bool relay = true;
  std::vector<mesh::Address> subscriptions;
  std::string cohort;
  std::optional<std::size_t> peer;  // roster index of the destination (Pairs)
  scenario::MobilityModel mobility = scenario::Static{};
  double fitness = 0.0;  // Formation candidates
  bool willing = true;   // Formation volunteers
};

struct ScenarioConfig {
  std::string scenario;
  std::string variant;
  std::uint64_t seed = 1;

  radio::PropagationParams propagation;
  bearer::AdvParams adv;
  bearer::ScanParams scan;
  bearer::ExtAdvParams ext;
  transport::TransportParams transport;
  transport::ExchangeParams exchange;
  TrafficSpec traffic;
  scenario::CoverageParams coverage;
  scenario::ElectionParams election;
  scenario::RecruitParams recruit;
  std::uint8_t ttl = 8;

  std::vector<NodeSpec> nodes;
  std::map<std::string, mesh::Address> cohort_groups;

  sim::Duration duration = 0;  // 0: start + iterations * period + drain
  sim::Duration mobility_tick = 100'000;
  sim::Duration rssi_period = 1'000'000;

  /// Filled by topology builders that calibrate (office layout).
  nlohmann::json calibration = nlohmann::json::object();

  [[nodiscard]] sim::Duration effective_duration() const;
};

/// Known scenario keys, in a stable order.
const std::vector<std::string>& scenario_keys();
/// Variants a scenario accepts; the first is the default.
std::vector<std::string> scenario_variants(const std::string& key);

/// Builds the effective config: scenario defaults, then the document's
/// overrides, then the roster (generated unless "nodes" is given).
/// `seed_override`, when set, replaces the document's seed.
/// Throws ConfigError listing every problem with its field path, and
/// scenario::CalibrationFault if the office layout cannot be calibrated.
ScenarioConfig load_config(const nlohmann::json& doc,
                           std::optional<std::uint64_t> seed_override = std::nullopt);

/// Convenience: defaults for `key`/`variant` with no overrides.
ScenarioConfig make_config(const std::string& key, std::uint64_t seed = 1,
                           const std::string& variant = "");

/// Semantic checks on a complete config; empty when valid.
std::vector<std::string> validate(const ScenarioConfig& cfg);

/// The full effective parameter set, as echoed into the run manifest.
nlohmann::json to_json(const ScenarioConfig& cfg);

}  // namespace meshsim::harness
