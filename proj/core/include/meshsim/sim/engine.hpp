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
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace meshsim::sim {

/// Simulation time in integer microseconds since the start of the run.
using SimTime = std::uint64_t;
using Duration = std::uint64_t;

inline constexpr SimTime kForever = std::numeric_limits<SimTime>::max();

constexpr SimTime from_ms(std::uint64_t ms) { return ms * 1000; }
constexpr SimTime from_s(std::uint64_t s) { return s * 1000000; }

using NodeId = std::uint32_t;
inline constexpr NodeId kGlobalTarget = std::numeric_limits<NodeId>::max();

enum class EventKind : std::uint8_t {
  Generic,
  AdvEventStart,
  FrameStart,
  FrameEnd,
  AdvEventEnd,
  Timer,
  Traffic,
  MobilityTick,
  ControllerTick,
};

struct Event {
  SimTime fire_at = 0;
  std::uint64_t tiebreak_seq = 0;
  NodeId target = kGlobalTarget;
  EventKind kind = EventKind::Generic;
  std::function<void()> action;
};

/// Raised when an event is scheduled before the current clock. This is a
/// programming fault; the run cannot continue.
class SchedulingFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Min-queue over (fire_at, tiebreak_seq). The tiebreak counter is assigned
/// on push, so equal-time events pop in insertion order.
class EventQueue {
 public:
  void push(Event event);
  Event pop();
  [[nodiscard]] const Event& top() const { return heap_.top(); }
  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }
  [[nodiscard]] std::uint64_t pushed() const { return next_seq_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.tiebreak_seq > b.tiebreak_seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

struct RunSummary {
  std::uint64_t events_processed = 0;
  SimTime clock = 0;
  std::uint64_t log_digest = 0;
};

/// Single-threaded discrete-event loop. Owns the clock and the queue.
class Simulator {
 public:
  [[nodiscard]] SimTime now() const { return clock_; }

  /// Throws SchedulingFault if `at` is earlier than the clock.
  void schedule(SimTime at, NodeId target, EventKind kind, std::function<void()> action);
  void schedule_in(Duration delay, NodeId target, EventKind kind, std::function<void()> action) {
    schedule(clock_ + delay, target, kind, std::move(action));
  }

  /// Processes every event with fire_at <= until, in total order. The clock
  /// ends at `until` unless `until` is kForever, in which case it stays at
  /// the last processed event.
  RunSummary run(SimTime until);

  /// Stops the loop after the currently executing event.
  void request_stop() { stop_requested_ = true; }

  [[nodiscard]] std::size_t pending() const { return queue_.size(); }
  [[nodiscard]] std::uint64_t processed() const { return processed_; }

  /// FNV-1a digest over (fire_at, seq, target, kind) of every processed event.
  [[nodiscard]] std::uint64_t log_digest() const { return digest_; }

  void enable_event_log(bool on) { keep_log_ = on; }
  struct LogEntry {
    SimTime fire_at;
    std::uint64_t seq;
    NodeId target;
    EventKind kind;
    bool operator==(const LogEntry&) const = default;
  };
  [[nodiscard]] const std::vector<LogEntry>& event_log() const { return log_; }

 private:
  void mix(std::uint64_t v);

  EventQueue queue_;
  SimTime clock_ = 0;
  std::uint64_t processed_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
  bool stop_requested_ = false;
  bool keep_log_ = false;
  std::vector<LogEntry> log_;
};

}  // namespace meshsim::sim
