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
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "meshsim/mesh/pdu.hpp"
#include "meshsim/radio/phy.hpp"
#include "meshsim/radio/propagation.hpp"
#include "meshsim/sim/engine.hpp"

namespace meshsim::radio {

enum class FrameKind : std::uint8_t { LegacyAdv, ExtIndication, ExtAux };

/// Pointer from an extended-advertising indication to its data frame.
struct AuxPointer {
  std::uint8_t channel = 0;
  sim::SimTime start = 0;
  sim::Duration airtime = 0;
};

struct TransmissionRecord {
  std::uint64_t id = 0;
  sim::NodeId tx_node = 0;
  std::uint8_t channel = 37;
  PhyMode phy = PhyMode::Uncoded1M;
  sim::SimTime start = 0;
  sim::Duration airtime = 0;
  std::uint32_t pdu_bytes = 0;
  FrameKind kind = FrameKind::LegacyAdv;
  std::shared_ptr<const mesh::NetworkPdu> pdu;  // empty for indications
  std::optional<AuxPointer> aux;                // indications only

  [[nodiscard]] sim::SimTime end() const { return start + airtime; }
};

/// Receiver state over the frame window, resolved by the caller.
struct ReceiverWindow {
  /// Own transmission overlaps the window (half duplex).
  bool transmitting = false;
  /// Radio tuned to this channel for the entire window. Empty when the
  /// scanner is idle for some part of it.
  std::optional<std::uint8_t> tuned_channel;
  /// Scanner listens on every primary channel at once (all_channels mode).
  bool all_primary = false;
};

/// Another transmission overlapping the frame, as seen at the receiver.
struct Interferer {
  std::uint8_t channel = 0;
  sim::SimTime start = 0;
  sim::SimTime end = 0;
  double rssi_dbm = 0.0;
};

enum class MissReason : std::uint8_t {
  WrongChannel,
  NotScanning,
  BelowSensitivity,
  Collision,
  BackgroundLoss,
};
std::string_view to_string(MissReason reason);

struct Received {
  double rssi_dbm = 0.0;
};
struct Miss {
  MissReason reason = MissReason::NotScanning;
};
using ReceptionOutcome = std::variant<Received, Miss>;

/// Half-open interval overlap.
constexpr bool overlaps(sim::SimTime a0, sim::SimTime a1, sim::SimTime b0, sim::SimTime b1) {
  return a0 < b1 && b0 < a1;
}

/// True when `other` destroys reception of a frame arriving at `rssi_dbm`.
bool interferes(const PropagationParams& params, double rssi_dbm, const Interferer& other,
                std::uint8_t channel, sim::SimTime start, sim::SimTime end);

/// Decides reception of `tx` at one receiver. `loss_draw` is a uniform
/// [0, 1) draw compared against the background loss probability.
ReceptionOutcome reception_outcome(const PropagationParams& params, const TransmissionRecord& tx,
                                   double rssi_dbm, const ReceiverWindow& rx,
                                   std::span<const Interferer> concurrent, double loss_draw);

}  // namespace meshsim::radio
