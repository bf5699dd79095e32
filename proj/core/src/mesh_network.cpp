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

#include "meshsim/net/mesh_network.hpp"

#include <algorithm>
#include <string>

namespace meshsim::net {

namespace {

// Longest frame we can emit (coded 125k, 255-byte payload) is ~17 ms.
constexpr sim::Duration kFrameRetention = 25'000;

}  // namespace

Node::Node(sim::NodeId node_id, NodeConfig cfg)
    : id(node_id),
      config(std::move(cfg)),
      net(config.unicast,
          RelayPolicy{config.relay_enabled, config.adv.n_events_relay, config.ttl_initial_default},
          config.cache_capacity),
      position(config.position) {
  for (const SubnetMembership& m : config.subnets) net.join_subnet(m.subnet, m.epoch);
  for (mesh::Address a : config.subscriptions) net.subscribe(a, 0);
}

MeshNetwork::MeshNetwork(std::uint64_t master_seed, radio::PropagationParams propagation,
                         transport::TransportParams transport)
    : seed_(master_seed), prop_(std::move(propagation)), transport_(transport) {
  if (auto err = prop_.validate()) throw std::invalid_argument(*err);
}

sim::NodeId MeshNetwork::add_node(NodeConfig config) {
  if (!config.unicast.is_unicast()) {
    throw std::invalid_argument("node unicast address must be in the unicast range");
  }
  if (find_unicast(config.unicast)) {
    throw std::invalid_argument("duplicate unicast address " + config.unicast.str());
  }
  if (auto err = config.adv.validate()) throw std::invalid_argument(*err);
  if (auto err = config.scan.validate()) throw std::invalid_argument(*err);
  if (config.ext.enabled) {
    if (auto err = config.ext.validate(config.adv)) throw std::invalid_argument(*err);
  }

  const auto id = static_cast<sim::NodeId>(nodes_.size());
  auto node = std::make_unique<Node>(id, std::move(config));
  node->bearer = std::make_unique<bearer::AdvBearer>(sim_, id, seed_, node->config.adv,
                                                     node->config.ext);
  node->bearer->set_frame_sink([this](const radio::TransmissionRecord& r) { frame_started(r); });
  node->bearer->set_done_sink([this](const bearer::QueuedPdu& q) {
    auto it = tag_done_.find(q.tag);
    if (it == tag_done_.end()) return;
    auto fn = std::move(it->second);
    tag_done_.erase(it);
    if (fn) fn();
  });
  sim::RandomStream phase(seed_, id, sim::StreamPurpose::ScanPhase);
  node->scan_phase = phase.draw_range(0, node->config.scan.scan_interval - 1);
  node->loss_stream = sim::RandomStream(seed_, id, sim::StreamPurpose::Loss);
  nodes_.push_back(std::move(node));

  for (auto& row : shadow_) row.push_back(0.0);
  for (auto& row : rssi_) row.push_back(0.0);
  shadow_.emplace_back(nodes_.size(), 0.0);
  rssi_.emplace_back(nodes_.size(), 0.0);
  for (sim::NodeId other = 0; other < id; ++other) {
    const double s = radio::link_shadow_db(seed_, id, other, prop_.shadowing_sigma_db);
    shadow_[id][other] = s;
    shadow_[other][id] = s;
  }
  recompute_links(id);
  return id;
}

std::optional<sim::NodeId> MeshNetwork::find_unicast(mesh::Address addr) const {
  for (const auto& n : nodes_) {
    if (n->config.unicast == addr) return n->id;
  }
  return std::nullopt;
}

void MeshNetwork::recompute_links(sim::NodeId id) {
  const radio::Position& p = nodes_[id]->position;
  for (sim::NodeId j = 0; j < nodes_.size(); ++j) {
    if (j == id) {
      rssi_[id][j] = 0.0;
      continue;
    }
    const double v = radio::link_rssi(prop_, p, nodes_[j]->position, shadow_[id][j]);
    rssi_[id][j] = v;
    rssi_[j][id] = v;
  }
}

void MeshNetwork::set_position(sim::NodeId id, const radio::Position& pos) {
  nodes_.at(id)->position = pos;
  recompute_links(id);
}

void MeshNetwork::subscribe(sim::NodeId id, mesh::Address addr) {
  node(id).net.subscribe(addr, sim_.now());
}

void MeshNetwork::unsubscribe(sim::NodeId id, mesh::Address addr) {
  node(id).net.unsubscribe(addr, sim_.now());
}

void MeshNetwork::set_access_handler(sim::NodeId id, AccessHandler handler) {
  node(id).handler = std::move(handler);
}

void MeshNetwork::blacklist_and_refresh(sim::NodeId bad) {
  Node& culprit = node(bad);
  culprit.config.blacklisted = true;
  for (const auto& [subnet, epoch] : culprit.net.subnets()) {
    for (auto& n : nodes_) {
      if (n->id == bad || n->config.blacklisted) continue;
      if (n->net.epoch_of(subnet)) n->net.bump_epoch(subnet);
    }
  }
}

MissCounters MeshNetwork::total_misses() const {
  MissCounters total{};
  for (const auto& n : nodes_) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += n->misses[i];
  }
  return total;
}

// ---------------------------------------------------------------------------
// Send path

mesh::NetworkPdu MeshNetwork::make_pdu(Node& from, mesh::Address dst, std::uint8_t ttl,
                                       mesh::TransportHeader header, mesh::Bytes payload) {
  if (from.net.subnets().empty()) {
    throw ProvisioningFault("node " + std::to_string(from.id) + " is not provisioned");
  }
  const auto& [subnet, epoch] = *from.net.subnets().begin();
  mesh::NetworkPdu pdu;
  pdu.subnet = subnet;
  pdu.epoch = epoch;
  pdu.ttl = std::min<std::uint8_t>(ttl, mesh::kMaxTtl);
  pdu.seq = from.net.next_seq();
  pdu.src = from.config.unicast;
  pdu.dst = dst;
  pdu.header = std::move(header);
  pdu.transport_payload = std::move(payload);
  // Own PDUs must never come back as fresh.
  from.net.cache().check_insert(pdu.src, pdu.seq);
  return pdu;
}

void MeshNetwork::send_pdu(Node& from, mesh::NetworkPdu pdu, std::uint8_t n_events,
                           std::function<void()> on_done) {
  const std::uint64_t tag = next_tag_++;
  if (on_done) tag_done_[tag] = std::move(on_done);
  auto shared = std::make_shared<const mesh::NetworkPdu>(std::move(pdu));
  if (!from.bearer->enqueue(std::move(shared), n_events, tag)) {
    // Dropped on overflow: report completion so upper layers can retry.
    auto it = tag_done_.find(tag);
    if (it != tag_done_.end()) {
      auto fn = std::move(it->second);
      tag_done_.erase(it);
      sim_.schedule(sim_.now(), from.id, sim::EventKind::Timer, std::move(fn));
    }
  }
}

std::uint64_t MeshNetwork::publish(sim::NodeId from_id, mesh::Address dst, mesh::Bytes payload,
                                   SendOptions options) {
  Node& from = node(from_id);
  if (from.net.subnets().empty()) {
    throw ProvisioningFault("node " + std::to_string(from_id) + " is not provisioned");
  }
  const bool extended = from.config.ext.enabled;
  if (extended && payload.size() > mesh::kMaxExtendedTransportPayload) {
    throw transport::PayloadTooLarge("payload exceeds one extended advertisement");
  }
  const transport::SegmentPlan plan = transport::segment_payload(
      payload, extended ? mesh::kMaxExtendedTransportPayload : mesh::kMaxLegacyTransportPayload);

  const std::uint8_t ttl = options.ttl.value_or(from.net.relay().ttl_initial_default);
  const std::uint8_t n_events = options.n_events.value_or(from.config.adv.n_events_source);
  const std::uint64_t handle = next_handle_++;

  if (!plan.segmented) {
    mesh::NetworkPdu pdu =
        make_pdu(from, dst, ttl, mesh::UnsegmentedAccess{}, std::move(payload));
    std::function<void()> done;
    if (options.on_sent) done = [cb = std::move(options.on_sent)] { cb(true); };
    send_pdu(from, std::move(pdu), n_events, std::move(done));
    return handle;
  }

  // SeqZero is the low 13 bits of the first segment's sequence number.
  const auto sz = static_cast<std::uint16_t>(from.net.peek_seq() & 0x1FFF);
  const auto seg_last = static_cast<std::uint8_t>(plan.units.size() - 1);
  from.tx_sar.erase(sz);
  from.tx_sar.emplace(sz, Node::TxSar{dst, plan.units, transport::SegmentedTransfer(seg_last), 0,
                                      0, 0, ttl, n_events, std::move(options.on_sent)});
  std::vector<std::uint8_t> all(plan.units.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint8_t>(i);
  send_segments(from, sz, all);
  return handle;
}

void MeshNetwork::send_segments(Node& from, std::uint16_t seq_zero,
                                const std::vector<std::uint8_t>& indices) {
  auto it = from.tx_sar.find(seq_zero);
  if (it == from.tx_sar.end()) return;
  Node::TxSar& sar = it->second;
  const auto seg_last = static_cast<std::uint8_t>(sar.units.size() - 1);
  for (std::uint8_t idx : indices) {
    mesh::NetworkPdu pdu = make_pdu(from, sar.dst, sar.ttl,
                                    mesh::SegmentHeader{seq_zero, idx, seg_last}, sar.units[idx]);
    ++sar.in_flight;
    const sim::NodeId from_id = from.id;
    send_pdu(from, std::move(pdu), sar.n_events, [this, from_id, seq_zero] {
      Node& n = node(from_id);
      auto sit = n.tx_sar.find(seq_zero);
      if (sit == n.tx_sar.end()) return;
      if (sit->second.in_flight > 0) --sit->second.in_flight;
      if (sit->second.in_flight != 0) return;
      if (!sit->second.dst.is_unicast()) {
        finish_tx(n, seq_zero, true);  // group destinations are not acknowledged
      } else {
        arm_tx_timer(n, seq_zero);
      }
    });
  }
}

void MeshNetwork::arm_tx_timer(Node& from, std::uint16_t seq_zero) {
  auto it = from.tx_sar.find(seq_zero);
  if (it == from.tx_sar.end()) return;
  const std::uint64_t gen = ++it->second.timer_gen;
  const sim::NodeId from_id = from.id;
  sim_.schedule_in(transport_.segment_retry, from_id, sim::EventKind::Timer,
                   [this, from_id, seq_zero, gen] {
                     Node& n = node(from_id);
                     auto sit = n.tx_sar.find(seq_zero);
                     if (sit == n.tx_sar.end() || sit->second.timer_gen != gen) return;
                     if (sit->second.in_flight != 0) return;
                     if (sit->second.retries >= transport_.max_block_retries) {
                       finish_tx(n, seq_zero, false);
                       return;
                     }
                     ++sit->second.retries;
                     send_segments(n, seq_zero, sit->second.transfer.missing());
                   });
}

void MeshNetwork::finish_tx(Node& from, std::uint16_t seq_zero, bool ok) {
  auto it = from.tx_sar.find(seq_zero);
  if (it == from.tx_sar.end()) return;
  auto cb = std::move(it->second.on_sent);
  from.tx_sar.erase(it);
  if (cb) cb(ok);
}

void MeshNetwork::send_segment_ack(Node& rx, mesh::Address to, std::uint16_t seq_zero,
                                   std::uint32_t block) {
  mesh::NetworkPdu ack = make_pdu(rx, to, rx.net.relay().ttl_initial_default,
                                  mesh::SegmentAck{seq_zero, block},
                                  transport::encode_segment_ack(seq_zero, block));
  send_pdu(rx, std::move(ack), rx.config.adv.n_events_source, nullptr);
}

// ---------------------------------------------------------------------------
// Radio medium

void MeshNetwork::frame_started(const radio::TransmissionRecord& record) {
  prune(sim_.now());
  ActiveFrame frame{record, rssi_[record.tx_node]};
  const std::uint64_t global_index = frames_evicted_ + frames_.size();
  frames_.push_back(std::move(frame));
  if (on_transmit) on_transmit(record);
  sim_.schedule(record.end(), record.tx_node, sim::EventKind::FrameEnd,
                [this, global_index, id = record.id] { frame_ended(global_index, id); });
}

void MeshNetwork::prune(sim::SimTime now) {
  while (!frames_.empty() && frames_.front().record.end() + kFrameRetention < now) {
    frames_.pop_front();
    ++frames_evicted_;
  }
}

void MeshNetwork::frame_ended(std::size_t global_index, std::uint64_t record_id) {
  const std::size_t idx = global_index - frames_evicted_;
  const ActiveFrame& frame = frames_.at(idx);
  if (frame.record.id != record_id) throw std::logic_error("medium frame bookkeeping mismatch");
  // Copy: evaluation may start new frames and grow the deque.
  const ActiveFrame snapshot = frame;
  for (auto& n : nodes_) {
    if (n->id == snapshot.record.tx_node) continue;
    evaluate(snapshot, *n);
  }
}

radio::ReceiverWindow MeshNetwork::window_for(const Node& rx,
                                              const radio::TransmissionRecord& tx) const {
  radio::ReceiverWindow w;
  const sim::SimTime s = tx.start;
  const sim::SimTime e = tx.end();
  w.transmitting = rx.bearer->transmitting_during(s, e);

  if (tx.kind == radio::FrameKind::ExtAux) {
    for (const auto& x : rx.aux) {
      if (x.tx == tx.tx_node && x.start == s && x.channel == tx.channel) {
        w.tuned_channel = tx.channel;
        return w;
      }
    }
    return w;
  }
  for (const auto& x : rx.aux) {
    if (radio::overlaps(s, e, x.start, x.end)) return w;  // retuned to a secondary channel
  }
  const bearer::ScanParams& scan = rx.config.scan;
  const bearer::ScanState a = bearer::scanner_channel_at(scan, s + rx.scan_phase);
  if (a.mode == bearer::ScanState::Mode::AllPrimary) {
    w.all_primary = true;
    return w;
  }
  const bearer::ScanState b = bearer::scanner_channel_at(scan, e - 1 + rx.scan_phase);
  if (a.mode == bearer::ScanState::Mode::Channel && a == b &&
      bearer::scan_slot(scan, s + rx.scan_phase) == bearer::scan_slot(scan, e - 1 + rx.scan_phase)) {
    w.tuned_channel = a.channel;
  }
  return w;
}

void MeshNetwork::evaluate(const ActiveFrame& frame, Node& rx) {
  const radio::TransmissionRecord& tx = frame.record;
  const double rssi = frame.rssi[rx.id];
  if (rssi < prop_.sensitivity_dbm) {
    ++rx.misses[static_cast<std::size_t>(radio::MissReason::BelowSensitivity)];
    return;
  }
  const radio::ReceiverWindow window = window_for(rx, tx);

  std::vector<radio::Interferer> concurrent;
  for (const ActiveFrame& other : frames_) {
    const radio::TransmissionRecord& o = other.record;
    if (o.start >= tx.end()) break;
    if (o.id == tx.id || o.tx_node == rx.id || o.channel != tx.channel) continue;
    if (!radio::overlaps(tx.start, tx.end(), o.start, o.end())) continue;
    concurrent.push_back(radio::Interferer{o.channel, o.start, o.end(), other.rssi[rx.id]});
  }

  const double draw = rx.loss_stream.next_double();
  radio::ReceptionOutcome outcome =
      radio::reception_outcome(prop_, tx, rssi, window, concurrent, draw);
  if (std::holds_alternative<radio::Received>(outcome) && force_drop && force_drop(rx.id, tx)) {
    outcome = radio::Miss{radio::MissReason::BackgroundLoss};
  }
  if (const auto* miss = std::get_if<radio::Miss>(&outcome)) {
    ++rx.misses[static_cast<std::size_t>(miss->reason)];
    return;
  }
  ++rx.frames_received;
  if (on_frame_rx) on_frame_rx(sim_.now(), rx.id, tx.tx_node, rssi);

  if (tx.kind == radio::FrameKind::ExtIndication) {
    const sim::SimTime now = sim_.now();
    std::erase_if(rx.aux, [now](const Node::AuxExpectation& x) { return x.end < now; });
    rx.aux.push_back(Node::AuxExpectation{tx.tx_node, tx.aux->channel, tx.aux->start,
                                          tx.aux->start + tx.aux->airtime});
    return;
  }
  if (tx.kind == radio::FrameKind::ExtAux) {
    std::erase_if(rx.aux, [&](const Node::AuxExpectation& x) {
      return x.tx == tx.tx_node && x.start == tx.start;
    });
  }
  handle_pdu(rx, tx.pdu, rssi);
}

// ---------------------------------------------------------------------------
// Receive path

void MeshNetwork::handle_pdu(Node& rx, const std::shared_ptr<const mesh::NetworkPdu>& pdu,
                             double rssi) {
  const RxDecision d = on_frame_received(rx.net, *pdu, sim_.now());
  if (on_network_rx) on_network_rx(rx.id, *pdu, d);
  if (d.relay) {
    ++rx.relayed;
    mesh::NetworkPdu copy = relayed_copy(*pdu);
    if (on_relay) on_relay(rx.id, copy);
    send_pdu(rx, std::move(copy), rx.net.relay().relay_n_events, nullptr);
  }
  if (d.deliver) transport_receive(rx, *pdu, rssi);
}

void MeshNetwork::transport_receive(Node& rx, const mesh::NetworkPdu& pdu, double rssi) {
  if (std::holds_alternative<mesh::UnsegmentedAccess>(pdu.header)) {
    deliver_access(rx, pdu, pdu.transport_payload, rssi);
    return;
  }

  if (const auto* ack = std::get_if<mesh::SegmentAck>(&pdu.header)) {
    auto it = rx.tx_sar.find(ack->seq_zero);
    if (it == rx.tx_sar.end() || it->second.dst != pdu.src) return;
    it->second.transfer.apply_ack(ack->block_ack);
    if (it->second.transfer.complete()) {
      finish_tx(rx, ack->seq_zero, true);
    } else if (it->second.in_flight == 0) {
      if (it->second.retries >= transport_.max_block_retries) {
        finish_tx(rx, ack->seq_zero, false);
        return;
      }
      ++it->second.retries;
      ++it->second.timer_gen;  // supersede the pending timer
      send_segments(rx, ack->seq_zero, it->second.transfer.missing());
    }
    return;
  }

  const auto& seg = std::get<mesh::SegmentHeader>(pdu.header);
  const std::pair<std::uint16_t, std::uint16_t> key{pdu.src.raw(), seg.seq_zero};
  const bool acked = pdu.dst.is_unicast();
  const sim::SimTime now = sim_.now();

  if (auto done = rx.rx_done.find(key); done != rx.rx_done.end()) {
    // Sender missed our ack; repeat it, at most once per ack interval.
    if (acked && now >= done->second + transport_.ack_timer) {
      done->second = now;
      send_segment_ack(rx, pdu.src, seg.seq_zero, transport::full_block_mask(seg.seg_last));
    }
    return;
  }

  auto [it, inserted] =
      rx.rx_sar.try_emplace(key, Node::RxSar{transport::Reassembler(seg.seg_last), pdu.dst, 0, false});
  const sim::NodeId rx_id = rx.id;
  if (inserted) {
    sim_.schedule_in(transport_.reassembly_timeout, rx_id, sim::EventKind::Timer, [this, rx_id, key] {
      if (node(rx_id).rx_sar.erase(key) > 0) ++node(rx_id).reassembly_timeouts;
    });
  }
  Node::RxSar& sar = it->second;
  const auto result = sar.buffer.add(seg.seg_index, seg.seg_last, pdu.transport_payload);
  if (result == transport::Reassembler::AddResult::Invalid) return;

  if (result == transport::Reassembler::AddResult::Completed) {
    mesh::Bytes payload = sar.buffer.payload();
    const std::uint32_t block = sar.buffer.block_ack();
    rx.rx_sar.erase(it);
    rx.rx_done[key] = now;
    if (acked) send_segment_ack(rx, pdu.src, seg.seq_zero, block);
    deliver_access(rx, pdu, std::move(payload), rssi);
    return;
  }
  if (!acked) return;
  if (seg.seg_index == seg.seg_last) {
    sar.last_ack = now;
    send_segment_ack(rx, pdu.src, seg.seq_zero, sar.buffer.block_ack());
  } else if (!sar.ack_armed) {
    sar.ack_armed = true;
    const mesh::Address src = pdu.src;
    sim_.schedule_in(transport_.ack_timer, rx_id, sim::EventKind::Timer, [this, rx_id, key, src] {
      Node& n = node(rx_id);
      auto sit = n.rx_sar.find(key);
      if (sit == n.rx_sar.end()) return;
      sit->second.ack_armed = false;
      send_segment_ack(n, src, key.second, sit->second.buffer.block_ack());
    });
  }
}

void MeshNetwork::deliver_access(Node& rx, const mesh::NetworkPdu& pdu, mesh::Bytes payload,
                                 double rssi) {
  if (!rx.handler) return;
  AccessMessage msg{rx.id, pdu.src, pdu.dst, std::move(payload), rssi, pdu.ttl, sim_.now()};
  rx.handler(msg);
}

}  // namespace meshsim::net
