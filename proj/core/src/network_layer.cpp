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

#include "meshsim/net/network_layer.hpp"

#include <stdexcept>

namespace meshsim::net {

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::SubnetMismatch: return "subnet_mismatch";
    case DropReason::EpochMismatch: return "epoch_mismatch";
    case DropReason::CacheDuplicate: return "cache_duplicate";
    case DropReason::ReplayReject: return "replay_reject";
    case DropReason::TtlFloor: return "ttl_floor";
  }
  return "unknown";
}

NetworkLayerState::NetworkLayerState(mesh::Address unicast, RelayPolicy relay,
                                     std::size_t cache_capacity)
    : unicast_(unicast), relay_(relay), cache_(cache_capacity) {}

std::optional<std::uint8_t> NetworkLayerState::epoch_of(mesh::SubnetId subnet) const {
  auto it = subnets_.find(subnet);
  if (it == subnets_.end()) return std::nullopt;
  return it->second;
}

void NetworkLayerState::bump_epoch(mesh::SubnetId subnet) {
  auto it = subnets_.find(subnet);
  if (it != subnets_.end()) ++it->second;
}

void NetworkLayerState::subscribe(mesh::Address addr, sim::SimTime now) {
  if (!addr.is_subscribable()) {
    throw std::invalid_argument("cannot subscribe to " + std::string(to_string(addr.cls())) +
                                " address " + addr.str());
  }
  subscriptions_[addr.raw()] = SubscriptionWindow{now, std::nullopt};
}

void NetworkLayerState::unsubscribe(mesh::Address addr, sim::SimTime now) {
  auto it = subscriptions_.find(addr.raw());
  if (it != subscriptions_.end() && !it->second.until) it->second.until = now;
}

bool NetworkLayerState::subscribed(mesh::Address addr, sim::SimTime at) const {
  auto it = subscriptions_.find(addr.raw());
  if (it == subscriptions_.end()) return false;
  const SubscriptionWindow& w = it->second;
  return at > w.since && (!w.until || at <= *w.until);
}

std::vector<mesh::Address> NetworkLayerState::active_subscriptions(sim::SimTime at) const {
  std::vector<mesh::Address> out;
  for (const auto& [raw, w] : subscriptions_) {
    if (subscribed(mesh::Address(raw), at)) out.emplace_back(raw);
  }
  return out;
}

bool NetworkLayerState::accepts(mesh::Address dst, sim::SimTime at) const {
  if (dst == unicast_) return true;
  if (dst.is_subscribable()) return subscribed(dst, at);
  return false;
}

std::uint32_t NetworkLayerState::next_seq() {
  if (seq_ >= mesh::kMaxSeq) throw std::overflow_error("sequence number space exhausted");
  return ++seq_;
}

RxDecision on_frame_received(NetworkLayerState& state, const mesh::NetworkPdu& pdu,
                             sim::SimTime now) {
  RxDecision d;
  const auto epoch = state.epoch_of(pdu.subnet);
  if (!epoch) {
    d.drop = DropReason::SubnetMismatch;
  } else if (*epoch != pdu.epoch) {
    d.drop = DropReason::EpochMismatch;
  } else if (state.cache().check_insert(pdu.src, pdu.seq) == mesh::CacheResult::Duplicate) {
    d.drop = DropReason::CacheDuplicate;
  }
  if (d.drop) {
    state.count_drop(*d.drop);
    return d;
  }

  if (state.accepts(pdu.dst, now)) {
    if (state.replay().check_update(pdu.src, pdu.epoch, pdu.seq) == mesh::ReplayResult::Accept) {
      d.deliver = true;
    } else {
      state.count_drop(DropReason::ReplayReject);
    }
  }

  if (state.relay().relay_enabled && pdu.dst != state.unicast()) {
    if (pdu.ttl >= 2) {
      d.relay = true;
    } else {
      state.count_drop(DropReason::TtlFloor);
    }
  }
  return d;
}

mesh::NetworkPdu relayed_copy(const mesh::NetworkPdu& pdu) {
  mesh::NetworkPdu out = pdu;
  out.ttl = static_cast<std::uint8_t>(pdu.ttl - 1);
  return out;
}

}  // namespace meshsim::net
