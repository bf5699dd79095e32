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

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "meshsim/radio/phy.hpp"
#include "meshsim/radio/propagation.hpp"
#include "meshsim/radio/reception.hpp"
#include "meshsim/sim/random.hpp"

namespace meshsim::radio {

std::string_view to_string(PhyMode phy) {
  switch (phy) {
    case PhyMode::Uncoded1M: return "1M";
    case PhyMode::Uncoded2M: return "2M";
    case PhyMode::Coded500k: return "coded500k";
    case PhyMode::Coded125k: return "coded125k";
  }
  return "unknown";
}

std::optional<PhyMode> parse_phy(std::string_view text) {
  if (text == "1M") return PhyMode::Uncoded1M;
  if (text == "2M") return PhyMode::Uncoded2M;
  if (text == "coded500k") return PhyMode::Coded500k;
  if (text == "coded125k") return PhyMode::Coded125k;
  return std::nullopt;
}

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::optional<std::string> PropagationParams::validate() const {
  for (double v : {tx_power_dbm, pl0_db, path_loss_exponent, floor_penalty_db, shadowing_sigma_db,
                   sensitivity_dbm, background_loss_prob}) {
    if (!std::isfinite(v)) return "non-finite propagation parameter";
  }
  if (capture_margin_db && !std::isfinite(*capture_margin_db)) return "capture_margin_db not finite";
  if (background_loss_prob < 0.0 || background_loss_prob > 1.0) {
    return "background_loss_prob must be in [0, 1]";
  }
  if (shadowing_sigma_db < 0.0) return "shadowing_sigma_db must be >= 0";
  if (path_loss_exponent <= 0.0) return "path_loss_exponent must be > 0";
  return std::nullopt;
}

double link_rssi(const PropagationParams& params, const Position& a, const Position& b,
                 double shadow_db) {
  const double d = std::max(distance(a, b), kMinDistanceM);
  const int floors = std::abs(a.floor - b.floor);
  return params.tx_power_dbm - params.pl0_db - 10.0 * params.path_loss_exponent * std::log10(d) -
         params.floor_penalty_db * floors + shadow_db;
}

double link_shadow_db(std::uint64_t master_seed, sim::NodeId a, sim::NodeId b, double sigma_db) {
  if (sigma_db == 0.0) return 0.0;
  const std::uint64_t lo = std::min(a, b);
  const std::uint64_t hi = std::max(a, b);
  sim::RandomStream stream(master_seed, (lo << 32) | hi, sim::StreamPurpose::Shadowing);
  return sigma_db * stream.next_normal();
}

std::string_view to_string(MissReason reason) {
  switch (reason) {
    case MissReason::WrongChannel: return "wrong_channel";
    case MissReason::NotScanning: return "not_scanning";
    case MissReason::BelowSensitivity: return "below_sensitivity";
    case MissReason::Collision: return "collision";
    case MissReason::BackgroundLoss: return "background_loss";
  }
  return "unknown";
}

bool interferes(const PropagationParams& params, double rssi_dbm, const Interferer& other,
                std::uint8_t channel, sim::SimTime start, sim::SimTime end) {
  if (other.channel != channel) return false;
  if (!overlaps(start, end, other.start, other.end)) return false;
  if (other.rssi_dbm < params.sensitivity_dbm) return false;
  if (params.capture_margin_db) return other.rssi_dbm >= rssi_dbm - *params.capture_margin_db;
  return true;
}

ReceptionOutcome reception_outcome(const PropagationParams& params, const TransmissionRecord& tx,
                                   double rssi_dbm, const ReceiverWindow& rx,
                                   std::span<const Interferer> concurrent, double loss_draw) {
  if (rx.transmitting) return Miss{MissReason::NotScanning};
  const bool listening = (rx.all_primary && is_primary_channel(tx.channel)) ||
                         (rx.tuned_channel && *rx.tuned_channel == tx.channel);
  if (!listening) {
    return rx.tuned_channel || rx.all_primary ? Miss{MissReason::WrongChannel}
                                              : Miss{MissReason::NotScanning};
  }
  if (rssi_dbm < params.sensitivity_dbm) return Miss{MissReason::BelowSensitivity};
  for (const Interferer& other : concurrent) {
    if (interferes(params, rssi_dbm, other, tx.channel, tx.start, tx.end())) {
      return Miss{MissReason::Collision};
    }
  }
  if (loss_draw < params.background_loss_prob) return Miss{MissReason::BackgroundLoss};
  return Received{rssi_dbm};
}

}  // namespace meshsim::radio
