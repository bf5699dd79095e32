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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "meshsim/bearer/params.hpp"
#include "meshsim/mesh/address.hpp"
#include "meshsim/mesh/cache.hpp"
#include "meshsim/mesh/pdu.hpp"
#include "meshsim/radio/propagation.hpp"
#include "meshsim/sim/engine.hpp"

namespace meshsim::net {

struct RelayPolicy {
  bool relay_enabled = true;
  std::uint8_t relay_n_events = 2;
  std::uint8_t ttl_initial_default = 8;
};

struct SubnetMembership {
  mesh::SubnetId subnet = 0;
  std::uint8_t epoch = 0;
  bool operator==(const SubnetMembership&) const = default;
};

struct NodeConfig {
  mesh::Address unicast;
  bool relay_enabled = true;
  std::vector<mesh::Address> subscriptions;
  mesh::Address publish_addr;
  std::vector<SubnetMembership> subnets{SubnetMembership{}};
  bearer::AdvParams adv;
  bearer::ScanParams scan;
  bearer::ExtAdvParams ext;
  std::uint8_t ttl_initial_default = 8;
  std::size_t cache_capacity = mesh::MessageCache::kDefaultCapacity;
  bool blacklisted = false;
  radio::Position position;
};

enum class DropReason : std::uint8_t {
  SubnetMismatch,
  EpochMismatch,
  CacheDuplicate,
  ReplayReject,
  TtlFloor,
};
inline constexpr std::size_t kDropReasonCount = 5;
std::string_view to_string(DropReason reason);

using DropCounters = std::array<std::uint64_t, kDropReasonCount>;

/// Subscription lifetime: active for frames received strictly after
/// `since` and not after `until`.
struct SubscriptionWindow {
  sim::SimTime since = 0;
  std::optional<sim::SimTime> until;
};

/// Protocol state the receive path reads and mutates.
class NetworkLayerState {
 public:
  NetworkLayerState(mesh::Address unicast, RelayPolicy relay, std::size_t cache_capacity);

  [[nodiscard]] mesh::Address unicast() const { return unicast_; }
  [[nodiscard]] const RelayPolicy& relay() const { return relay_; }
  RelayPolicy& relay() { return relay_; }

  void join_subnet(mesh::SubnetId subnet, std::uint8_t epoch) { subnets_[subnet] = epoch; }
  [[nodiscard]] std::optional<std::uint8_t> epoch_of(mesh::SubnetId subnet) const;
  void bump_epoch(mesh::SubnetId subnet);
  [[nodiscard]] const std::map<mesh::SubnetId, std::uint8_t>& subnets() const { return subnets_; }

  /// Throws std::invalid_argument for unicast or unassigned addresses.
  void subscribe(mesh::Address addr, sim::SimTime now);
  void unsubscribe(mesh::Address addr, sim::SimTime now);
  [[nodiscard]] bool subscribed(mesh::Address addr, sim::SimTime at) const;
  [[nodiscard]] std::vector<mesh::Address> active_subscriptions(sim::SimTime at) const;

  /// Destination filter: own unicast or an active group/virtual subscription.
  [[nodiscard]] bool accepts(mesh::Address dst, sim::SimTime at) const;

  mesh::MessageCache& cache() { return cache_; }
  mesh::ReplayTable& replay() { return replay_; }
  [[nodiscard]] const DropCounters& drops() const { return drops_; }
  void count_drop(DropReason reason) { ++drops_[static_cast<std::size_t>(reason)]; }

  /// Next 24-bit sequence number for an originated PDU (starts at 1).
  std::uint32_t next_seq();
  [[nodiscard]] std::uint32_t peek_seq() const { return seq_ + 1; }

 private:
  mesh::Address unicast_;
  RelayPolicy relay_;
  std::map<mesh::SubnetId, std::uint8_t> subnets_;
  std::map<std::uint16_t, SubscriptionWindow> subscriptions_;
  mesh::MessageCache cache_;
  mesh::ReplayTable replay_;
  DropCounters drops_{};
  std::uint32_t seq_ = 0;
};

struct RxDecision {
  bool deliver = false;
  bool relay = false;
  std::optional<DropReason> drop;
};

/// Receive path for a frame that passed radio arbitration: subnet/epoch
/// filter, cache dedupe, then independent deliver and relay decisions.
/// Replay protection gates delivery only.
RxDecision on_frame_received(NetworkLayerState& state, const mesh::NetworkPdu& pdu,
                             sim::SimTime now);

/// Copy of `pdu` as a relay retransmits it.
mesh::NetworkPdu relayed_copy(const mesh::NetworkPdu& pdu);

}  // namespace meshsim::net
