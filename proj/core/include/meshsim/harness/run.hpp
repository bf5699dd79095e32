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

#include "meshsim/harness/config.hpp"
#include "meshsim/harness/metrics.hpp"
#include "meshsim/net/mesh_network.hpp"

namespace meshsim::harness {

/// Optional instrumentation for a run; tests use it to watch the medium.
struct RunHooks {
  /// Called once the network is built and before the first event.
  std::function<void(net::MeshNetwork&)> on_network;
};

/// Primary latency metric for a traffic pattern: round trip for
/// command/status traffic, one way otherwise.
std::string metric_for(const ScenarioConfig& cfg);

/// Runs one configuration to completion. The result is a pure function of
/// the config (seed included). Throws ConfigError when validation fails.
MetricsReport run_scenario(const ScenarioConfig& cfg, const RunHooks& hooks = {});

/// Fixed protocol constants, echoed into every manifest.
nlohmann::json constants_table();

}  // namespace meshsim::harness
