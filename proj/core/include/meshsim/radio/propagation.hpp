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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "meshsim/sim/engine.hpp"

namespace meshsim::radio {

struct Position {
  double x = 0.0;
  double y = 0.0;
  int floor = 0;
  bool operator==(const Position&) const = default;
};

/// Horizontal distance in meters; floors are handled by a fixed penalty.
double distance(const Position& a, const Position& b);

struct PropagationParams {
  double tx_power_dbm = 0.0;
  double pl0_db = 40.0;
  double path_loss_exponent = 4.6;
  double floor_penalty_db = 25.0;
  double shadowing_sigma_db = 4.0;
  double sensitivity_dbm = -90.0;
  /// Disabled when empty: any overlapping same-channel arrival above
  /// sensitivity destroys both frames.
  std::optional<double> capture_margin_db;
  double background_loss_prob = 0.10;

  /// Returns a description of the first violated invariant, if any.
  [[nodiscard]] std::optional<std::string> validate() const;
};

inline constexpr double kMinDistanceM = 0.1;

/// Log-distance path loss with a per-floor penalty and a frozen shadowing
/// term. Distance is clamped below at 0.1 m.
double link_rssi(const PropagationParams& params, const Position& a, const Position& b,
                 double shadow_db);

/// Frozen per-link shadowing draw for a run. Symmetric in (a, b).
double link_shadow_db(std::uint64_t master_seed, sim::NodeId a, sim::NodeId b, double sigma_db);

}  // namespace meshsim::radio
