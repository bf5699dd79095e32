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

#include "meshsim/harness/config.hpp"

namespace meshsim::harness {

// Scenario library. Each key sets its traffic and parameter defaults first;
// user overrides are applied on top; the roster is generated last so that
// layouts see the final propagation parameters.

inline constexpr mesh::Address kSingleHopGroup{0xC001};
inline constexpr mesh::Address kMultiHopGroup{0xC002};
inline constexpr mesh::Address kServersGroup{0xC030};
inline constexpr mesh::Address kBeaconGroup{0xC020};

inline constexpr std::size_t kLineNodes = 130;
inline constexpr double kLineSpacingM = 10.0;

void apply_scenario_defaults(ScenarioConfig& cfg);
void build_roster(ScenarioConfig& cfg);

}  // namespace meshsim::harness
