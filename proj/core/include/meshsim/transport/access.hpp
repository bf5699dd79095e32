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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "meshsim/net/mesh_network.hpp"

namespace meshsim::transport {

enum class Opcode : std::uint8_t {
  Command = 0x01,
  Status = 0x02,
  Data = 0x03,
  Beacon = 0x10,
  Candidacy = 0x20,
  Recruit = 0x21,
  Volunteer = 0x22,
  Confirm = 0x23,
  FormationCmd = 0x24,
};

std::string_view to_string(Opcode op);

/// opcode(1) msg_id(4) arg(4) body_len(1)
inline constexpr std::size_t kAppHeaderBytes = 10;

/// Application payload carried in an access message.
struct AppMessage {
  Opcode opcode = Opcode::Data;
  std::uint32_t msg_id = 0;
  std::uint32_t arg = 0;
  mesh::Bytes body;  // at most 255 bytes

  bool operator==(const AppMessage&) const = default;
};

/// Serializes `msg`, padding with a msg_id-derived filler up to `min_size`
/// so receivers can verify the bytes end to end.
mesh::Bytes encode_app(const AppMessage& msg, std::size_t min_size = 0);

/// Inverse of encode_app. Returns nullopt for truncated input, unknown
/// opcodes or a corrupted filler.
std::optional<AppMessage> decode_app(const mesh::Bytes& bytes);

/// Demultiplexes each node's access messages by opcode.
class AccessRouter {
 public:
  using Handler = std::function<void(const net::AccessMessage&, const AppMessage&)>;

  explicit AccessRouter(net::MeshNetwork& network) : net_(network) {}
  AccessRouter(const AccessRouter&) = delete;
  AccessRouter& operator=(const AccessRouter&) = delete;

  /// Adds a handler; several may share a (node, opcode).
  void on(sim::NodeId node, Opcode op, Handler handler);

  std::uint64_t send(sim::NodeId from, mesh::Address dst, const AppMessage& msg,
                     std::size_t size = 0, net::SendOptions options = {});

  net::MeshNetwork& network() { return net_; }
  [[nodiscard]] std::uint64_t delivered() const { return delivered_; }
  [[nodiscard]] std::uint64_t malformed() const { return malformed_; }

 private:
  void dispatch(const net::AccessMessage& msg);

  net::MeshNetwork& net_;
  std::map<sim::NodeId, std::multimap<Opcode, Handler>> handlers_;
  std::uint64_t delivered_ = 0;
  std::uint64_t malformed_ = 0;
};

enum class ExchangeMode : std::uint8_t { Unicast, Group };

std::string_view to_string(ExchangeMode mode);

struct ExchangeParams {
  sim::Duration retry_initial = 200'000;
  sim::Duration retry_cap = 1'600'000;
  std::uint8_t group_events = 2;
  std::uint8_t status_events = 3;
  /// Extra unacknowledged status copies a server sends in Group mode.
  std::uint8_t group_status_retries = 0;
  std::size_t message_size = 11;  // command payload bytes
  std::size_t status_size = 11;   // status payload bytes
  std::optional<std::uint8_t> ttl;
};

struct RecipientOutcome {
  sim::NodeId node = 0;
  mesh::Address addr;
  std::optional<sim::SimTime> t_deliver;  // first command delivery
  std::optional<sim::SimTime> t_status;   // first status back at the client
  std::uint8_t ttl_spent = 0;
};

struct Exchange {
  std::uint32_t msg_id = 0;
  ExchangeMode mode = ExchangeMode::Unicast;
  sim::NodeId client = 0;
  mesh::Address dst;
  sim::SimTime t_publish = 0;
  std::uint8_t ttl = 0;
  std::uint32_t command_tx = 0;
  std::vector<RecipientOutcome> recipients;
  bool settled = false;
  sim::Duration backoff = 0;
  std::uint64_t timer_gen = 0;
};

/// Command/status exchanges. Unicast mode retransmits with exponential
/// backoff until the status arrives; Group mode publishes once over a fixed
/// number of events and every subscribed server answers with one status.
class AckedMessaging {
 public:
  AckedMessaging(AccessRouter& router, ExchangeParams params);
  AckedMessaging(const AckedMessaging&) = delete;
  AckedMessaging& operator=(const AckedMessaging&) = delete;

  /// Makes `node` answer commands with a status.
  void serve(sim::NodeId node);

  /// Starts an exchange. `dst` must be unicast in Unicast mode and a group
  /// or virtual address in Group mode; `expected` lists the servers whose
  /// outcome is tracked. Returns the message id.
  std::uint32_t send(sim::NodeId client, mesh::Address dst, ExchangeMode mode,
                     const std::vector<sim::NodeId>& expected);

  [[nodiscard]] const std::vector<Exchange>& exchanges() const { return exchanges_; }
  [[nodiscard]] const Exchange& exchange(std::uint32_t msg_id) const {
    return exchanges_.at(msg_id - 1);
  }
  [[nodiscard]] const ExchangeParams& params() const { return params_; }

  std::function<void(const Exchange&, const RecipientOutcome&)> on_status;

 private:
  void transmit(std::uint32_t msg_id);
  void arm_retry(std::uint32_t msg_id);
  void on_command(sim::NodeId server, const net::AccessMessage& msg, const AppMessage& app);
  void on_status_rx(sim::NodeId client, const net::AccessMessage& msg, const AppMessage& app);
  void send_status(sim::NodeId server, mesh::Address to, std::uint32_t msg_id, std::uint8_t left);

  AccessRouter& router_;
  ExchangeParams params_;
  std::vector<Exchange> exchanges_;
  std::map<sim::NodeId, bool> clients_;
};

}  // namespace meshsim::transport
