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

#include "meshsim/bearer/adv_bearer.hpp"

#include <algorithm>

#include "meshsim/radio/phy.hpp"

namespace meshsim::bearer {

std::optional<std::string> AdvParams::validate() const {
  if (adv_interval < 1000) return "adv_interval must be >= 1000 us";
  if (n_events_source < 1 || n_events_relay < 1) return "n_events must be >= 1";
  if (queue_depth < 1) return "queue_depth must be >= 1";
  return std::nullopt;
}

std::string_view to_string(ScanMode mode) {
  return mode == ScanMode::Rotate ? "rotate" : "all_channels";
}

std::optional<ScanMode> parse_scan_mode(std::string_view text) {
  if (text == "rotate") return ScanMode::Rotate;
  if (text == "all_channels") return ScanMode::AllChannels;
  return std::nullopt;
}

std::optional<std::string> ScanParams::validate() const {
  if (scan_interval == 0) return "scan_interval must be > 0";
  if (scan_window > scan_interval) return "scan_window must be <= scan_interval";
  return std::nullopt;
}

std::optional<std::string> ExtAdvParams::validate(const AdvParams& adv) const {
  const sim::Duration ind = radio::airtime(ext_ind_bytes, radio::PhyMode::Uncoded1M);
  if (aux_offset < 3 * ind + 2 * adv.inter_channel_gap) {
    return "aux_offset must leave room for the three indications";
  }
  if (ext_ind_bytes < 1) return "ext_ind_bytes must be >= 1";
  return std::nullopt;
}

AdvEventPlan plan_adv_event(const AdvParams& params, sim::Duration frame_airtime,
                            sim::RandomStream& stream, sim::SimTime t0) {
  AdvEventPlan plan;
  sim::SimTime t = t0;
  for (std::size_t i = 0; i < 3; ++i) {
    plan.frames[i] = PlannedFrame{radio::kPrimaryChannels[i], t};
    t += frame_airtime + params.inter_channel_gap;
  }
  plan.end = plan.frames[2].start + frame_airtime;
  plan.adv_delay = stream.draw_range(0, params.adv_delay_max);
  plan.next_event_start = t0 + params.adv_interval + plan.adv_delay;
  return plan;
}

ScanState scanner_channel_at(const ScanParams& params, sim::SimTime t) {
  if (params.mode == ScanMode::AllChannels) return {ScanState::Mode::AllPrimary, 0};
  const sim::SimTime within = t % params.scan_interval;
  if (within >= params.scan_window) return {ScanState::Mode::Idle, 0};
  const std::uint64_t slot = scan_slot(params, t);
  return {ScanState::Mode::Channel, radio::kPrimaryChannels[slot % 3]};
}

std::uint8_t draw_aux_channel(sim::RandomStream& stream) {
  return static_cast<std::uint8_t>(stream.draw_range(0, 36));
}

AdvBearer::AdvBearer(sim::Simulator& sim, sim::NodeId node, std::uint64_t master_seed,
                     AdvParams adv, ExtAdvParams ext)
    : sim_(sim),
      node_(node),
      adv_(adv),
      ext_(ext),
      delay_stream_(master_seed, node, sim::StreamPurpose::AdvDelay),
      channel_stream_(master_seed, node, sim::StreamPurpose::ChannelPick) {}

bool AdvBearer::enqueue(std::shared_ptr<const mesh::NetworkPdu> pdu, std::uint8_t n_events,
                        std::uint64_t tag) {
  if (queue_.size() >= adv_.queue_depth) {
    ++counters_.dropped_overflow;
    return false;
  }
  ++counters_.enqueued;
  queue_.push_back(QueuedPdu{std::move(pdu), std::max<std::uint8_t>(n_events, 1), 0, tag});
  if (!active_) {
    active_ = true;
    schedule_event(sim_.now() + delay_stream_.draw_range(0, adv_.adv_delay_max));
  }
  return true;
}

bool AdvBearer::transmitting_during(sim::SimTime s, sim::SimTime e) const {
  return std::any_of(busy_.begin(), busy_.end(),
                     [&](const auto& iv) { return radio::overlaps(s, e, iv.first, iv.second); });
}

void AdvBearer::schedule_event(sim::SimTime at) {
  sim_.schedule(at, node_, sim::EventKind::AdvEventStart, [this] { run_event(); });
}

void AdvBearer::emit_frame(radio::TransmissionRecord record) {
  record.id = (static_cast<std::uint64_t>(node_) << 40) | next_record_id_++;
  ++counters_.frames;
  if (record.start == sim_.now()) {
    if (frame_sink_) frame_sink_(record);
    return;
  }
  sim_.schedule(record.start, node_, sim::EventKind::FrameStart, [this, record] {
    if (frame_sink_) frame_sink_(record);
  });
}

void AdvBearer::run_event() {
  if (queue_.empty()) {
    active_ = false;
    return;
  }
  const sim::SimTime t0 = sim_.now();
  const QueuedPdu& head = queue_.front();
  ++counters_.events;

  sim::SimTime event_end = 0;
  sim::SimTime next_start = 0;
  if (!ext_.enabled) {
    const auto bytes = static_cast<std::uint32_t>(mesh::legacy_frame_bytes(*head.pdu));
    const sim::Duration air = radio::airtime(bytes, radio::PhyMode::Uncoded1M);
    const AdvEventPlan plan = plan_adv_event(adv_, air, delay_stream_, t0);
    for (const PlannedFrame& f : plan.frames) {
      radio::TransmissionRecord rec;
      rec.tx_node = node_;
      rec.channel = f.channel;
      rec.phy = radio::PhyMode::Uncoded1M;
      rec.start = f.start;
      rec.airtime = air;
      rec.pdu_bytes = bytes;
      rec.kind = radio::FrameKind::LegacyAdv;
      rec.pdu = head.pdu;
      emit_frame(std::move(rec));
    }
    event_end = plan.end;
    next_start = plan.next_event_start;
  } else {
    const sim::Duration ind_air = radio::airtime(ext_.ext_ind_bytes, radio::PhyMode::Uncoded1M);
    const AdvEventPlan plan = plan_adv_event(adv_, ind_air, delay_stream_, t0);
    const auto aux_bytes = static_cast<std::uint32_t>(head.pdu->transport_payload.size());
    radio::AuxPointer aux{draw_aux_channel(channel_stream_), t0 + ext_.aux_offset,
                          radio::airtime(std::max<std::uint32_t>(aux_bytes, 1), ext_.data_phy)};
    for (const PlannedFrame& f : plan.frames) {
      radio::TransmissionRecord rec;
      rec.tx_node = node_;
      rec.channel = f.channel;
      rec.phy = radio::PhyMode::Uncoded1M;
      rec.start = f.start;
      rec.airtime = ind_air;
      rec.pdu_bytes = ext_.ext_ind_bytes;
      rec.kind = radio::FrameKind::ExtIndication;
      rec.aux = aux;
      emit_frame(std::move(rec));
    }
    radio::TransmissionRecord data;
    data.tx_node = node_;
    data.channel = aux.channel;
    data.phy = ext_.data_phy;
    data.start = aux.start;
    data.airtime = aux.airtime;
    data.pdu_bytes = std::max<std::uint32_t>(aux_bytes, 1);
    data.kind = radio::FrameKind::ExtAux;
    data.pdu = head.pdu;
    emit_frame(std::move(data));
    event_end = aux.start + aux.airtime;
    next_start = std::max(plan.next_event_start, event_end);
  }

  busy_.emplace_back(t0, event_end);
  while (busy_.size() > 4) busy_.pop_front();
  sim_.schedule(event_end, node_, sim::EventKind::AdvEventEnd,
                [this, event_end, next_start] { finish_event(event_end, next_start); });
}

void AdvBearer::finish_event(sim::SimTime event_end, sim::SimTime next_start) {
  QueuedPdu& head = queue_.front();
  ++head.events_done;
  if (head.events_done < head.n_events) {
    schedule_event(next_start);
    return;
  }
  QueuedPdu done = std::move(head);
  queue_.pop_front();
  if (done_sink_) done_sink_(done);
  if (queue_.empty()) {
    active_ = false;
    return;
  }
  schedule_event(event_end + delay_stream_.draw_range(0, adv_.adv_delay_max));
}

}  // namespace meshsim::bearer
