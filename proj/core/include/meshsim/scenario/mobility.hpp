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

#include <optional>
#include <string>
#include <variant>

#include "meshsim/radio/propagation.hpp"
#include "meshsim/sim/engine.hpp"
#include "meshsim/sim/random.hpp"

namespace meshsim::scenario {

struct Bounds {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  [[nodiscard]] bool contains(const radio::Position& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

struct Static {};

struct RandomWaypoint {
  Bounds bounds;
  double speed_mps = 0.5;
  sim::Duration pause = 0;
  // Walk state.
  std::optional<radio::Position> target;
  sim::Duration paused_for = 0;
};

struct BackAndForth {
  radio::Position p0;
  radio::Position p1;
  double speed_mps = 0.5;
  bool toward_p1 = true;
};

using MobilityModel = std::variant<Static, RandomWaypoint, BackAndForth>;

std::string mobility_name(const MobilityModel& model);

/// Returns a description of what is wrong with the parameters, if anything.
std::optional<std::string> validate(const MobilityModel& model);

/// Advances `pos` by `dt` (> 0). Moving variants never cover more than
/// speed * dt. The floor is preserved.
radio::Position step_mobility(MobilityModel& model, const radio::Position& pos, sim::Duration dt,
                              sim::RandomStream& stream);

}  // namespace meshsim::scenario
