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

#include "meshsim/scenario/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meshsim::scenario {

namespace {

// Moves from `from` toward `to` by at most `budget` metres.
radio::Position advance(const radio::Position& from, const radio::Position& to, double budget,
                        double& used) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double dist = std::hypot(dx, dy);
  if (dist <= budget) {
    used = dist;
    return {to.x, to.y, from.floor};
  }
  used = budget;
  return {from.x + dx / dist * budget, from.y + dy / dist * budget, from.floor};
}

}  // namespace

std::string mobility_name(const MobilityModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Static>) return "static";
        if constexpr (std::is_same_v<T, RandomWaypoint>) return "random_waypoint";
        return "back_and_forth";
      },
      model);
}

std::optional<std::string> validate(const MobilityModel& model) {
  if (const auto* rw = std::get_if<RandomWaypoint>(&model)) {
    if (!(rw->speed_mps > 0.0)) return "random_waypoint speed must be > 0";
    if (rw->bounds.x_max < rw->bounds.x_min || rw->bounds.y_max < rw->bounds.y_min) {
      return "random_waypoint bounds are inverted";
    }
  }
  if (const auto* bf = std::get_if<BackAndForth>(&model)) {
    if (!(bf->speed_mps > 0.0)) return "back_and_forth speed must be > 0";
  }
  return std::nullopt;
}

radio::Position step_mobility(MobilityModel& model, const radio::Position& pos, sim::Duration dt,
                              sim::RandomStream& stream) {
  if (dt == 0) throw std::invalid_argument("mobility step needs dt > 0");
  const double seconds = static_cast<double>(dt) / 1e6;

  if (auto* rw = std::get_if<RandomWaypoint>(&model)) {
    sim::Duration left = dt;
    radio::Position p = pos;
    for (int guard = 0; guard < 64 && left > 0; ++guard) {
      if (rw->paused_for > 0) {
        const sim::Duration wait = std::min(rw->paused_for, left);
        rw->paused_for -= wait;
        left -= wait;
        continue;
      }
      if (!rw->target) {
        const Bounds& b = rw->bounds;
        rw->target = radio::Position{b.x_min + stream.next_double() * (b.x_max - b.x_min),
                                     b.y_min + stream.next_double() * (b.y_max - b.y_min), p.floor};
      }
      double used = 0.0;
      p = advance(p, *rw->target, rw->speed_mps * static_cast<double>(left) / 1e6, used);
      if (p.x != rw->target->x || p.y != rw->target->y) break;
      rw->target.reset();
      rw->paused_for = rw->pause;
      const auto spent = static_cast<sim::Duration>(std::ceil(used / rw->speed_mps * 1e6));
      left -= std::min(left, spent);
    }
    return p;
  }

  if (auto* bf = std::get_if<BackAndForth>(&model)) {
    double budget = bf->speed_mps * seconds;
    radio::Position p = pos;
    for (int guard = 0; guard < 64 && budget > 1e-12; ++guard) {
      const radio::Position& goal = bf->toward_p1 ? bf->p1 : bf->p0;
      double used = 0.0;
      p = advance(p, goal, budget, used);
      budget -= used;
      if (p.x == goal.x && p.y == goal.y) bf->toward_p1 = !bf->toward_p1;
      if (used == 0.0 && bf->p0.x == bf->p1.x && bf->p0.y == bf->p1.y) break;
    }
    return p;
  }

  return pos;
}

}  // namespace meshsim::scenario
