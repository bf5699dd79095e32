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
#include <memory>
#include <optional>

#include "meshsim/bearer/params.hpp"
#include "meshsim/mesh/pdu.hpp"
#include "meshsim/radio/reception.hpp"
#include "meshsim/sim/engine.hpp"
#include "meshsim/sim/random.hpp"

namespace meshsim::bearer {

struct PlannedFrame {
  std::uint8_t channel = 37;
  sim::SimTime start = 0;
};

struct AdvEventPlan {
  std::array<PlannedFrame, 3> frames{};
  sim::SimTime end = 0;                 // end of the last primary frame
  sim::SimTime next_event_start = 0;    // t0 + adv_interval + advDelay
  sim::Duration adv_delay = 0;
};

/// Lays out one advertising event starting at t0: the same frame on 37, 38
/// and 39 back to back, then draws advDelay for the following event.
AdvEventPlan plan_adv_event(const AdvParams& params, sim::Duration frame_airtime,
                            sim::RandomStream& stream, sim::SimTime t0);

/// Scanner state at one instant.
struct ScanState {
  enum class Mode : std::uint8_t { Idle, Channel, AllPrimary };
  Mode mode = Mode::Idle;
  std::uint8_t channel = 0;
  bool operator==(const ScanState&) const = default;
};

/// Rotation 37 -> 38 -> 39, one channel per scan interval; idle for the
/// part of each interval beyond the window.
ScanState scanner_channel_at(const ScanParams& params, sim::SimTime t);

/// Index of the scan interval containing t (the channel is constant inside).
constexpr std::uint64_t scan_slot(const ScanParams& params, sim::SimTime t) {
  return params.scan_interval == 0 ? 0 : t / params.scan_interval;
}

/// Uniform aux channel in 0..36.
std::uint8_t draw_aux_channel(sim::RandomStream& stream);

struct QueuedPdu {
  std::shared_ptr<const mesh::NetworkPdu> pdu;
  std::uint8_t n_events = 1;
  std::uint8_t events_done = 0;
  std::uint64_t tag = 0;
};

struct BearerCounters {
  std::uint64_t enqueued = 0;
  std::uint64_t dropped_overflow = 0;
  std::uint64_t events = 0;
  std::uint64_t frames = 0;
};

/// Per-node advertiser. One PDU per advertising event, FIFO across PDUs:
/// every event of the head PDU is sent before the next PDU starts. Events
/// of one PDU are spaced by adv_interval + advDelay; a new PDU starts
/// advDelay after the bearer goes idle or finishes the previous one.
class AdvBearer {
 public:
  using FrameSink = std::function<void(const radio::TransmissionRecord&)>;
  using DoneSink = std::function<void(const QueuedPdu&)>;

  AdvBearer(sim::Simulator& sim, sim::NodeId node, std::uint64_t master_seed, AdvParams adv,
            ExtAdvParams ext);

  void set_frame_sink(FrameSink sink) { frame_sink_ = std::move(sink); }
  void set_done_sink(DoneSink sink) { done_sink_ = std::move(sink); }

  /// Returns false (and counts a drop) when the queue is full.
  bool enqueue(std::shared_ptr<const mesh::NetworkPdu> pdu, std::uint8_t n_events,
               std::uint64_t tag = 0);

  /// True when one of this node's own advertising events overlaps [s, e).
  [[nodiscard]] bool transmitting_during(sim::SimTime s, sim::SimTime e) const;

  [[nodiscard]] const AdvParams& params() const { return adv_; }
  [[nodiscard]] AdvParams& mutable_params() { return adv_; }
  [[nodiscard]] const ExtAdvParams& ext_params() const { return ext_; }
  [[nodiscard]] const BearerCounters& counters() const { return counters_; }
  [[nodiscard]] std::size_t queued() const { return queue_.size(); }
  [[nodiscard]] bool idle() const { return !active_; }

 private:
  void schedule_event(sim::SimTime at);
  void run_event();
  void finish_event(sim::SimTime event_end, sim::SimTime next_start);
  void emit_frame(radio::TransmissionRecord record);

  sim::Simulator& sim_;
  sim::NodeId node_;
  AdvParams adv_;
  ExtAdvParams ext_;
  sim::RandomStream delay_stream_;
  sim::RandomStream channel_stream_;
  std::deque<QueuedPdu> queue_;
  bool active_ = false;
  std::deque<std::pair<sim::SimTime, sim::SimTime>> busy_;
  BearerCounters counters_;
  FrameSink frame_sink_;
  DoneSink done_sink_;
  std::uint64_t next_record_id_ = 0;
};

}  // namespace meshsim::bearer
