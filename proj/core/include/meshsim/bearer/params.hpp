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
#include <string>
#include <string_view>

#include "meshsim/radio/phy.hpp"
#include "meshsim/sim/engine.hpp"

namespace meshsim::bearer {

struct AdvParams {
  sim::Duration adv_interval = 20'000;
  sim::Duration adv_delay_max = 10'000;
  sim::Duration inter_channel_gap = 400;
  std::uint8_t n_events_source = 3;
  std::uint8_t n_events_relay = 2;
  std::size_t queue_depth = 32;

  [[nodiscard]] std::optional<std::string> validate() const;
};

enum class ScanMode : std::uint8_t { Rotate, AllChannels };
std::string_view to_string(ScanMode mode);
std::optional<ScanMode> parse_scan_mode(std::string_view text);

struct ScanParams {
  sim::Duration scan_interval = 2'000'000;
  sim::Duration scan_window = 2'000'000;  // == interval: continuous
  ScanMode mode = ScanMode::Rotate;

  [[nodiscard]] std::optional<std::string> validate() const;
};

struct ExtAdvParams {
  bool enabled = false;
  sim::Duration aux_offset = 1'500;
  radio::PhyMode data_phy = radio::PhyMode::Uncoded2M;
  std::uint32_t ext_ind_bytes = 10;

  [[nodiscard]] std::optional<std::string> validate(const AdvParams& adv) const;
};

}  // namespace meshsim::bearer
