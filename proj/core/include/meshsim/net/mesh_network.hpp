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
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "meshsim/bearer/adv_bearer.hpp"
#include "meshsim/mesh/pdu.hpp"
#include "meshsim/net/network_layer.hpp"
#include "meshsim/radio/propagation.hpp"
#include "meshsim/radio/reception.hpp"
#include "meshsim/sim/engine.hpp"
#include "meshsim/sim/random.hpp"
#include "meshsim/transport/segmentation.hpp"

namespace meshsim::net {

/// Publishing from a node that is not provisioned into any subnet.
class ProvisioningFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An access-layer message handed up by the transport.
struct AccessMessage {
  sim::NodeId node = 0;  // receiving node
  mesh::Address src;
  mesh::Address dst;
  mesh::Bytes payload;
  double rssi_dbm = 0.0;  // frame that completed delivery
  std::uint8_t ttl = 0;   // TTL of that frame
  sim::SimTime at = 0;
};

using AccessHandler = std::function<void(const AccessMessage&)>;

struct SendOptions {
  std::optional<std::uint8_t> ttl;
  std::optional<std::uint8_t> n_events;
  /// Called once the message has left the node: after the last advertising
  /// event for unacknowledged sends, after the block ack (true) or retry
  /// exhaustion (false) for segmented sends to a unicast address.
  std::function<void(bool ok)> on_sent;
};

using MissCounters = std::array<std::uint64_t, 5>;

/// One simulated node: protocol state plus its radio-facing bearer.
struct Node {
  Node(sim::NodeId id, NodeConfig config);

  struct AuxExpectation {
    sim::NodeId tx = 0;
    std::uint8_t channel = 0;
    sim::SimTime start = 0;
    sim::SimTime end = 0;
  };
  struct RxSar {
    transport::Reassembler buffer;
    mesh::Address dst;
    sim::SimTime last_ack = 0;
    bool ack_armed = false;
  };
  struct TxSar {
    mesh::Address dst;
    std::vector<mesh::Bytes> units;
    transport::SegmentedTransfer transfer;
    std::size_t in_flight = 0;
    std::uint8_t retries = 0;
    std::uint64_t timer_gen = 0;
    std::uint8_t ttl = 0;
    std::uint8_t n_events = 0;
    std::function<void(bool)> on_sent;
  };

  sim::NodeId id;
  NodeConfig config;
  NetworkLayerState net;
  std::unique_ptr<bearer::AdvBearer> bearer;
  radio::Position position;
  sim::Duration scan_phase = 0;
  sim::RandomStream loss_stream;
  std::vector<AuxExpectation> aux;
  AccessHandler handler;
  std::map<std::pair<std::uint16_t, std::uint16_t>, RxSar> rx_sar;
  std::map<std::pair<std::uint16_t, std::uint16_t>, sim::SimTime> rx_done;
  std::map<std::uint16_t, TxSar> tx_sar;
  MissCounters misses{};
  std::uint64_t frames_received = 0;
  std::uint64_t relayed = 0;
  std::uint64_t reassembly_timeouts = 0;
};

/// The simulated world: event loop, shared radio medium and every node's
/// bearer, network and lower-transport layers.
class MeshNetwork {
 public:
  MeshNetwork(std::uint64_t master_seed, radio::PropagationParams propagation,
              transport::TransportParams transport = {});
  MeshNetwork(const MeshNetwork&) = delete;
  MeshNetwork& operator=(const MeshNetwork&) = delete;

  sim::Simulator& sim() { return sim_; }
  [[nodiscard]] sim::SimTime now() const { return sim_.now(); }
  [[nodiscard]] std::uint64_t master_seed() const { return seed_; }
  [[nodiscard]] const radio::PropagationParams& propagation() const { return prop_; }
  [[nodiscard]] const transport::TransportParams& transport_params() const { return transport_; }

  sim::NodeId add_node(NodeConfig config);
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  Node& node(sim::NodeId id) { return *nodes_.at(id); }
  [[nodiscard]] const Node& node(sim::NodeId id) const { return *nodes_.at(id); }
  [[nodiscard]] std::optional<sim::NodeId> find_unicast(mesh::Address addr) const;

  /// Originates an access message. Throws ProvisioningFault when the node
  /// has no subnet, transport::PayloadTooLarge when the payload does not
  /// fit the bearer after segmentation.
  std::uint64_t publish(sim::NodeId from, mesh::Address dst, mesh::Bytes payload,
                        SendOptions options = {});

  void subscribe(sim::NodeId id, mesh::Address addr);
  void unsubscribe(sim::NodeId id, mesh::Address addr);
  void set_access_handler(sim::NodeId id, AccessHandler handler);

  /// Bumps the epoch of every subnet shared with `bad` at every other
  /// member; `bad` keeps its old epoch and is marked blacklisted.
  void blacklist_and_refresh(sim::NodeId bad);

  void set_position(sim::NodeId id, const radio::Position& pos);
  [[nodiscard]] const radio::Position& position(sim::NodeId id) const { return node(id).position; }
  /// Current link RSSI including frozen shadowing.
  [[nodiscard]] double rssi(sim::NodeId a, sim::NodeId b) const { return rssi_[a][b]; }
  [[nodiscard]] double shadow(sim::NodeId a, sim::NodeId b) const { return shadow_[a][b]; }

  // Observation hooks. All optional.
  std::function<void(const radio::TransmissionRecord&)> on_transmit;
  std::function<void(sim::SimTime, sim::NodeId rx, sim::NodeId tx, double rssi)> on_frame_rx;
  std::function<void(sim::NodeId relay, const mesh::NetworkPdu&)> on_relay;
  std::function<void(sim::NodeId, const mesh::NetworkPdu&, const RxDecision&)> on_network_rx;
  /// Lets tests force a miss: return true to drop the frame at `rx`.
  std::function<bool(sim::NodeId rx, const radio::TransmissionRecord&)> force_drop;

  [[nodiscard]] MissCounters total_misses() const;

 private:
  struct ActiveFrame {
    radio::TransmissionRecord record;
    std::vector<double> rssi;  // per receiver, snapshot at frame start
  };

  void recompute_links(sim::NodeId id);
  void frame_started(const radio::TransmissionRecord& record);
  void frame_ended(std::size_t frame_index_hint, std::uint64_t record_id);
  void evaluate(const ActiveFrame& frame, Node& rx);
  radio::ReceiverWindow window_for(const Node& rx, const radio::TransmissionRecord& tx) const;
  void handle_pdu(Node& rx, const std::shared_ptr<const mesh::NetworkPdu>& pdu, double rssi);
  void transport_receive(Node& rx, const mesh::NetworkPdu& pdu, double rssi);
  void deliver_access(Node& rx, const mesh::NetworkPdu& pdu, mesh::Bytes payload, double rssi);

  mesh::NetworkPdu make_pdu(Node& from, mesh::Address dst, std::uint8_t ttl,
                            mesh::TransportHeader header, mesh::Bytes payload);
  void send_pdu(Node& from, mesh::NetworkPdu pdu, std::uint8_t n_events,
                std::function<void()> on_done);
  void send_segments(Node& from, std::uint16_t seq_zero, const std::vector<std::uint8_t>& indices);
  void arm_tx_timer(Node& from, std::uint16_t seq_zero);
  void finish_tx(Node& from, std::uint16_t seq_zero, bool ok);
  void send_segment_ack(Node& rx, mesh::Address to, std::uint16_t seq_zero, std::uint32_t block);
  void prune(sim::SimTime now);

  std::uint64_t seed_;
  radio::PropagationParams prop_;
  transport::TransportParams transport_;
  sim::Simulator sim_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<std::vector<double>> shadow_;
  std::vector<std::vector<double>> rssi_;
  std::deque<ActiveFrame> frames_;
  std::uint64_t frames_evicted_ = 0;
  std::map<std::uint64_t, std::function<void()>> tag_done_;
  std::uint64_t next_tag_ = 1;
  std::uint64_t next_handle_ = 1;
};

}  // namespace meshsim::net
