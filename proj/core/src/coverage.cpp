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

#include "meshsim/scenario/coverage.hpp"

#include <algorithm>
#include <cmath>

namespace meshsim::scenario {

std::optional<std::string> CoverageParams::validate() const {
  if (target_degree < 1) return "coverage.target_degree must be >= 1";
  if (!(move_step_m > 0.0)) return "coverage.move_step_m must be > 0";
  if (beacon_period == 0) return "coverage.beacon_period_us must be > 0";
  return std::nullopt;
}

void NeighborTable::heard(sim::NodeId id, double rssi, std::optional<double> echoed,
                          sim::SimTime now) {
  NeighborEntry& e = entries_[id];
  e.id = id;
  e.last_rssi_heard = rssi;
  if (echoed) e.rssi_they_heard_me = echoed;
  e.last_seen = now;
}

void NeighborTable::expire(sim::SimTime now, sim::Duration beacon_period) {
  std::erase_if(entries_, [&](const auto& kv) {
    return now > kv.second.last_seen && now - kv.second.last_seen > 3 * beacon_period;
  });
}

int NeighborTable::mutual_degree(double threshold) const {
  int degree = 0;
  for (const auto& [id, e] : entries_) {
    if (e.rssi_they_heard_me && std::min(e.last_rssi_heard, *e.rssi_they_heard_me) >= threshold) {
      ++degree;
    }
  }
  return degree;
}

std::optional<NeighborEntry> NeighborTable::strongest() const {
  std::optional<NeighborEntry> best;
  for (const auto& [id, e] : entries_) {
    if (!best || e.last_rssi_heard > best->last_rssi_heard) best = e;
  }
  return best;
}

CoverageDecision coverage_tick(const radio::Position& self, const NeighborTable& table,
                               const CoverageParams& params,
                               const std::function<radio::Position(sim::NodeId)>& position_of) {
  if (table.empty()) return Stay{};
  if (table.mutual_degree(params.rssi_threshold_dbm) >= params.target_degree) return Stay{};
  const NeighborEntry target = *table.strongest();
  const radio::Position there = position_of(target.id);
  const double dx = there.x - self.x;
  const double dy = there.y - self.y;
  const double dist = std::hypot(dx, dy);
  if (dist <= 0.0) return Stay{};
  // Half the remaining gap at most, so each move strictly closes in.
  const double step = std::min(params.move_step_m, dist / 2.0);
  return Move{target.id, dx / dist * step, dy / dist * step};
}

// ---------------------------------------------------------------------------

CoverageController::CoverageController(transport::AccessRouter& router, CoverageParams params,
                                       mesh::Address group)
    : router_(router), params_(params), group_(group) {
  if (auto err = params_.validate()) throw std::invalid_argument(*err);
}

void CoverageController::add(sim::NodeId node, bool mobile) {
  members_.push_back(node);
  if (mobile) mobile_.push_back(node);
  tables_[node];
  net::MeshNetwork& net = router_.network();
  if (!net.node(node).net.subscribed(group_, net.now() + 1)) net.subscribe(node, group_);
  router_.on(node, transport::Opcode::Beacon,
             [this, node](const net::AccessMessage& m, const transport::AppMessage& app) {
               const auto sender = static_cast<sim::NodeId>(app.arg);
               std::optional<double> echoed;
               const mesh::Address me = router_.network().node(node).config.unicast;
               // Body: repeated (unicast hi, unicast lo, rssi as int8).
               for (std::size_t i = 0; i + 2 < app.body.size(); i += 3) {
                 const auto addr = static_cast<std::uint16_t>((app.body[i] << 8) | app.body[i + 1]);
                 if (addr == me.raw()) echoed = static_cast<std::int8_t>(app.body[i + 2]);
               }
               tables_[node].heard(sender, m.rssi_dbm, echoed, m.at);
             });
}

void CoverageController::start(sim::SimTime at) {
  sim::Simulator& sim = router_.network().sim();
  for (sim::NodeId n : members_) {
    sim.schedule(at, n, sim::EventKind::Traffic, [this, n] { beacon(n); });
  }
  sim.schedule(at + params_.beacon_period / 2, sim::kGlobalTarget, sim::EventKind::ControllerTick,
               [this] { tick(); });
}

int CoverageController::degree(sim::NodeId node) const {
  return tables_.at(node).mutual_degree(params_.rssi_threshold_dbm);
}

void CoverageController::beacon(sim::NodeId node) {
  net::MeshNetwork& net = router_.network();
  NeighborTable& table = tables_[node];
  table.expire(net.now(), params_.beacon_period);
  transport::AppMessage msg{transport::Opcode::Beacon, ++beacon_seq_, node, {}};
  for (const auto& [id, e] : table.entries()) {
    if (msg.body.size() + 3 > 240) break;
    const std::uint16_t addr = net.node(id).config.unicast.raw();
    const double clamped = std::clamp(std::round(e.last_rssi_heard), -128.0, 127.0);
    msg.body.push_back(static_cast<std::uint8_t>(addr >> 8));
    msg.body.push_back(static_cast<std::uint8_t>(addr));
    msg.body.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(clamped)));
  }
  net::SendOptions opts;
  opts.ttl = 1;  // one-hop neighbourhood only
  router_.send(node, group_, msg, 0, std::move(opts));
  net.sim().schedule_in(params_.beacon_period, node, sim::EventKind::Traffic,
                        [this, node] { beacon(node); });
}

void CoverageController::tick() {
  net::MeshNetwork& net = router_.network();
  ++ticks_;
  bool all_ok = true;
  for (sim::NodeId n : mobile_) {
    NeighborTable& table = tables_[n];
    table.expire(net.now(), params_.beacon_period);
    const radio::Position here = net.position(n);
    const CoverageDecision d = coverage_tick(here, table, params_,
                                             [&](sim::NodeId id) { return net.position(id); });
    if (const auto* mv = std::get_if<Move>(&d)) {
      ++moves_;
      net.set_position(n, {here.x + mv->dx, here.y + mv->dy, here.floor});
    }
    all_ok = all_ok && table.mutual_degree(params_.rssi_threshold_dbm) >= params_.target_degree;
  }
  if (all_ok && !converged_at_) converged_at_ = ticks_;
  net.sim().schedule_in(params_.beacon_period, sim::kGlobalTarget, sim::EventKind::ControllerTick,
                        [this] { tick(); });
}

}  // namespace meshsim::scenario
