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

#include "meshsim/transport/access.hpp"

#include <algorithm>
#include <stdexcept>

namespace meshsim::transport {

namespace {

std::uint8_t filler(std::uint32_t msg_id, std::size_t offset) {
  return static_cast<std::uint8_t>(msg_id * 31u + offset * 7u + 0x5Au);
}

bool known_opcode(std::uint8_t op) {
  switch (static_cast<Opcode>(op)) {
    case Opcode::Command:
    case Opcode::Status:
    case Opcode::Data:
    case Opcode::Beacon:
    case Opcode::Candidacy:
    case Opcode::Recruit:
    case Opcode::Volunteer:
    case Opcode::Confirm:
    case Opcode::FormationCmd:
      return true;
  }
  return false;
}

void put_u32(mesh::Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t get_u32(const mesh::Bytes& in, std::size_t at) {
  return (std::uint32_t{in[at]} << 24) | (std::uint32_t{in[at + 1]} << 16) |
         (std::uint32_t{in[at + 2]} << 8) | std::uint32_t{in[at + 3]};
}

}  // namespace

std::string_view to_string(Opcode op) {
  switch (op) {
    case Opcode::Command: return "command";
    case Opcode::Status: return "status";
    case Opcode::Data: return "data";
    case Opcode::Beacon: return "beacon";
    case Opcode::Candidacy: return "candidacy";
    case Opcode::Recruit: return "recruit";
    case Opcode::Volunteer: return "volunteer";
    case Opcode::Confirm: return "confirm";
    case Opcode::FormationCmd: return "formation_cmd";
  }
  return "unknown";
}

std::string_view to_string(ExchangeMode mode) {
  return mode == ExchangeMode::Unicast ? "unicast" : "group";
}

mesh::Bytes encode_app(const AppMessage& msg, std::size_t min_size) {
  if (msg.body.size() > 255) throw std::length_error("application body over 255 bytes");
  mesh::Bytes out;
  out.reserve(std::max(min_size, kAppHeaderBytes + msg.body.size()));
  out.push_back(static_cast<std::uint8_t>(msg.opcode));
  put_u32(out, msg.msg_id);
  put_u32(out, msg.arg);
  out.push_back(static_cast<std::uint8_t>(msg.body.size()));
  out.insert(out.end(), msg.body.begin(), msg.body.end());
  while (out.size() < min_size) out.push_back(filler(msg.msg_id, out.size()));
  return out;
}

std::optional<AppMessage> decode_app(const mesh::Bytes& bytes) {
  if (bytes.size() < kAppHeaderBytes || !known_opcode(bytes[0])) return std::nullopt;
  AppMessage msg;
  msg.opcode = static_cast<Opcode>(bytes[0]);
  msg.msg_id = get_u32(bytes, 1);
  msg.arg = get_u32(bytes, 5);
  const std::size_t body_len = bytes[9];
  if (bytes.size() < kAppHeaderBytes + body_len) return std::nullopt;
  msg.body.assign(bytes.begin() + kAppHeaderBytes,
                  bytes.begin() + static_cast<std::ptrdiff_t>(kAppHeaderBytes + body_len));
  for (std::size_t i = kAppHeaderBytes + body_len; i < bytes.size(); ++i) {
    if (bytes[i] != filler(msg.msg_id, i)) return std::nullopt;
  }
  return msg;
}

// ---------------------------------------------------------------------------

void AccessRouter::on(sim::NodeId node, Opcode op, Handler handler) {
  auto [it, fresh] = handlers_.try_emplace(node);
  if (fresh) {
    net_.set_access_handler(node, [this](const net::AccessMessage& m) { dispatch(m); });
  }
  it->second.emplace(op, std::move(handler));
}

std::uint64_t AccessRouter::send(sim::NodeId from, mesh::Address dst, const AppMessage& msg,
                                 std::size_t size, net::SendOptions options) {
  return net_.publish(from, dst, encode_app(msg, size), std::move(options));
}

void AccessRouter::dispatch(const net::AccessMessage& msg) {
  const auto app = decode_app(msg.payload);
  if (!app) {
    ++malformed_;
    return;
  }
  ++delivered_;
  auto node_it = handlers_.find(msg.node);
  if (node_it == handlers_.end()) return;
  auto [lo, hi] = node_it->second.equal_range(app->opcode);
  // Copy first: a handler may register more handlers.
  std::vector<Handler> todo;
  for (auto it = lo; it != hi; ++it) todo.push_back(it->second);
  for (auto& h : todo) h(msg, *app);
}

// ---------------------------------------------------------------------------

AckedMessaging::AckedMessaging(AccessRouter& router, ExchangeParams params)
    : router_(router), params_(params) {
  if (params_.retry_initial == 0 || params_.retry_cap < params_.retry_initial) {
    throw std::invalid_argument("retry backoff must satisfy 0 < initial <= cap");
  }
  if (params_.group_events == 0 || params_.status_events == 0) {
    throw std::invalid_argument("event counts must be positive");
  }
}

void AckedMessaging::serve(sim::NodeId node) {
  router_.on(node, Opcode::Command, [this, node](const net::AccessMessage& m, const AppMessage& a) {
    on_command(node, m, a);
  });
}

std::uint32_t AckedMessaging::send(sim::NodeId client, mesh::Address dst, ExchangeMode mode,
                                   const std::vector<sim::NodeId>& expected) {
  if (mode == ExchangeMode::Unicast && !dst.is_unicast()) {
    throw std::invalid_argument("unicast exchange needs a unicast destination");
  }
  if (mode == ExchangeMode::Group && !dst.is_subscribable()) {
    throw std::invalid_argument("group exchange needs a group or virtual destination");
  }
  net::MeshNetwork& network = router_.network();
  if (!clients_.contains(client)) {
    clients_[client] = true;
    router_.on(client, Opcode::Status, [this, client](const net::AccessMessage& m, const AppMessage& a) {
      on_status_rx(client, m, a);
    });
  }

  Exchange ex;
  ex.msg_id = static_cast<std::uint32_t>(exchanges_.size() + 1);
  ex.mode = mode;
  ex.client = client;
  ex.dst = dst;
  ex.t_publish = network.now();
  ex.ttl = params_.ttl.value_or(network.node(client).net.relay().ttl_initial_default);
  ex.backoff = params_.retry_initial;
  for (sim::NodeId n : expected) {
    ex.recipients.push_back(RecipientOutcome{n, network.node(n).config.unicast, {}, {}, 0});
  }
  exchanges_.push_back(std::move(ex));
  const std::uint32_t id = exchanges_.back().msg_id;
  transmit(id);
  return id;
}

void AckedMessaging::transmit(std::uint32_t msg_id) {
  Exchange& ex = exchanges_.at(msg_id - 1);
  ++ex.command_tx;
  net::SendOptions opts;
  opts.ttl = ex.ttl;
  if (ex.mode == ExchangeMode::Group) {
    opts.n_events = params_.group_events;
  } else {
    opts.on_sent = [this, msg_id](bool) { arm_retry(msg_id); };
  }
  router_.send(ex.client, ex.dst, AppMessage{Opcode::Command, msg_id, 0, {}}, params_.message_size,
               std::move(opts));
}

void AckedMessaging::arm_retry(std::uint32_t msg_id) {
  Exchange& ex = exchanges_.at(msg_id - 1);
  if (ex.settled) return;
  const std::uint64_t gen = ++ex.timer_gen;
  const sim::Duration wait = ex.backoff;
  ex.backoff = std::min(ex.backoff * 2, params_.retry_cap);
  router_.network().sim().schedule_in(wait, ex.client, sim::EventKind::Timer, [this, msg_id, gen] {
    Exchange& e = exchanges_.at(msg_id - 1);
    if (e.settled || e.timer_gen != gen) return;
    transmit(msg_id);
  });
}

void AckedMessaging::on_command(sim::NodeId server, const net::AccessMessage& msg,
                                const AppMessage& app) {
  if (app.msg_id == 0 || app.msg_id > exchanges_.size()) return;
  Exchange& ex = exchanges_[app.msg_id - 1];
  for (RecipientOutcome& r : ex.recipients) {
    if (r.node == server && !r.t_deliver) {
      r.t_deliver = msg.at;
      r.ttl_spent = static_cast<std::uint8_t>(ex.ttl - msg.ttl);
    }
  }
  const std::uint8_t extra = ex.mode == ExchangeMode::Group ? params_.group_status_retries : 0;
  send_status(server, msg.src, app.msg_id, extra);
}

void AckedMessaging::send_status(sim::NodeId server, mesh::Address to, std::uint32_t msg_id,
                                 std::uint8_t left) {
  net::SendOptions opts;
  opts.n_events = params_.status_events;
  opts.ttl = params_.ttl;
  if (left > 0) {
    opts.on_sent = [this, server, to, msg_id, left](bool) {
      router_.network().sim().schedule_in(params_.retry_initial, server, sim::EventKind::Timer,
                                          [this, server, to, msg_id, left] {
                                            send_status(server, to, msg_id, left - 1);
                                          });
    };
  }
  router_.send(server, to, AppMessage{Opcode::Status, msg_id, 0, {}}, params_.status_size,
               std::move(opts));
}

void AckedMessaging::on_status_rx(sim::NodeId client, const net::AccessMessage& msg,
                                  const AppMessage& app) {
  if (app.msg_id == 0 || app.msg_id > exchanges_.size()) return;
  Exchange& ex = exchanges_[app.msg_id - 1];
  if (ex.client != client) return;
  bool all = true;
  std::vector<std::size_t> fresh;
  for (std::size_t i = 0; i < ex.recipients.size(); ++i) {
    RecipientOutcome& r = ex.recipients[i];
    if (r.addr == msg.src && !r.t_status) {
      r.t_status = msg.at;
      fresh.push_back(i);
    }
    all = all && r.t_status.has_value();
  }
  if (all && ex.mode == ExchangeMode::Unicast) {
    ex.settled = true;
    ++ex.timer_gen;
  }
  // Hooks run last so they observe the settled flag; copy in case a hook
  // starts another exchange and the vector reallocates.
  if (!on_status) return;
  for (std::size_t i : fresh) {
    const Exchange snapshot = exchanges_[app.msg_id - 1];
    on_status(snapshot, snapshot.recipients[i]);
  }
}

}  // namespace meshsim::transport
