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

#include "meshsim/sim/engine.hpp"

#include <cmath>
#include <numbers>

#include "meshsim/sim/random.hpp"

namespace meshsim::sim {

void EventQueue::push(Event event) {
  event.tiebreak_seq = next_seq_++;
  heap_.push(std::move(event));
}

Event EventQueue::pop() {
  // priority_queue::top is const; the action has to be moved out.
  Event e = std::move(const_cast<Event&>(heap_.top()));
  heap_.pop();
  return e;
}

void Simulator::schedule(SimTime at, NodeId target, EventKind kind, std::function<void()> action) {
  if (at < clock_) {
    throw SchedulingFault("event scheduled in the past: fire_at=" + std::to_string(at) +
                          " clock=" + std::to_string(clock_));
  }
  queue_.push(Event{at, 0, target, kind, std::move(action)});
}

void Simulator::mix(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    digest_ ^= (v >> (8 * i)) & 0xff;
    digest_ *= 0x100000001b3ULL;
  }
}

RunSummary Simulator::run(SimTime until) {
  stop_requested_ = false;
  std::uint64_t count = 0;
  while (!queue_.empty() && !stop_requested_) {
    if (queue_.top().fire_at > until) break;
    Event e = queue_.pop();
    clock_ = e.fire_at;
    mix(e.fire_at);
    mix(e.tiebreak_seq);
    mix((static_cast<std::uint64_t>(e.target) << 8) | static_cast<std::uint64_t>(e.kind));
    if (keep_log_) log_.push_back({e.fire_at, e.tiebreak_seq, e.target, e.kind});
    ++count;
    ++processed_;
    if (e.action) e.action();
  }
  if (until != kForever && !stop_requested_ && clock_ < until) clock_ = until;
  return RunSummary{count, clock_, digest_};
}

std::string_view to_string(StreamPurpose purpose) {
  switch (purpose) {
    case StreamPurpose::AdvDelay: return "adv_delay";
    case StreamPurpose::Shadowing: return "shadowing";
    case StreamPurpose::ChannelPick: return "channel_pick";
    case StreamPurpose::Mobility: return "mobility";
    case StreamPurpose::Loss: return "loss";
    case StreamPurpose::Topology: return "topology";
    case StreamPurpose::Traffic: return "traffic";
    case StreamPurpose::ScanPhase: return "scan_phase";
    case StreamPurpose::Cooperation: return "cooperation";
  }
  return "unknown";
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t node, StreamPurpose purpose) {
  std::uint64_t k = mix64(master_seed);
  k = mix64(k ^ mix64(node + 0x632be59bd9b4e019ULL));
  k = mix64(k ^ (static_cast<std::uint64_t>(purpose) * 0xd1342543de82ef95ULL));
  key_ = k;
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t i = counter_++;
  return mix64(key_ ^ mix64(i));
}

double RandomStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::draw_range(std::uint64_t lo, std::uint64_t hi) {
  if (hi <= lo) return lo;
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return next_u64();  // full 64-bit range
  __extension__ using u128 = unsigned __int128;
  const auto product = static_cast<u128>(next_u64()) * span;
  return lo + static_cast<std::uint64_t>(product >> 64);
}

double RandomStream::next_normal() {
  double u1 = next_double();
  const double u2 = next_double();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t node, StreamPurpose purpose) {
  return RandomStream(master_seed, node, purpose);
}

}  // namespace meshsim::sim
