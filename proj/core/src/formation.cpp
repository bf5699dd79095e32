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

#include "meshsim/scenario/formation.hpp"

#include <algorithm>
#include <bit>

namespace meshsim::scenario {

namespace {

mesh::Bytes encode_fitness(double f) {
  const auto bits = std::bit_cast<std::uint64_t>(f);
  mesh::Bytes out(8);
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
  return out;
}

std::optional<double> decode_fitness(const mesh::Bytes& in) {
  if (in.size() != 8) return std::nullopt;
  std::uint64_t bits = 0;
  for (std::uint8_t b : in) bits = (bits << 8) | b;
  return std::bit_cast<double>(bits);
}

}  // namespace

std::optional<sim::NodeId> select_leader(const std::map<sim::NodeId, double>& heard) {
  std::optional<sim::NodeId> best;
  double best_fitness = 0.0;
  for (const auto& [id, fitness] : heard) {  // ascending id, so ties keep the lower one
    if (!best || fitness > best_fitness) {
      best = id;
      best_fitness = fitness;
    }
  }
  return best;
}

LeaderElection::LeaderElection(transport::AccessRouter& router, ElectionParams params)
    : router_(router), params_(params) {
  if (!params_.group.is_subscribable()) {
    throw std::invalid_argument("election group must be a group or virtual address");
  }
  if (params_.rounds == 0 || params_.window < params_.rounds) {
    throw std::invalid_argument("election needs 1 <= rounds <= window");
  }
}

void LeaderElection::add_member(sim::NodeId node) {
  members_.push_back(node);
  heard_[node];
  net::MeshNetwork& net = router_.network();
  if (!net.node(node).net.subscribed(params_.group, net.now() + 1)) net.subscribe(node, params_.group);
  router_.on(node, transport::Opcode::Candidacy,
             [this, node](const net::AccessMessage& m, const transport::AppMessage& app) {
               if (finished_) return;
               const auto from = router_.network().find_unicast(m.src);
               const auto fitness = decode_fitness(app.body);
               if (from && fitness) heard_[node][*from] = *fitness;
             });
}

void LeaderElection::add_candidate(sim::NodeId node, double fitness) {
  candidates_[node] = fitness;
}

void LeaderElection::start(sim::SimTime at) {
  sim::Simulator& sim = router_.network().sim();
  const sim::Duration slot = params_.window / params_.rounds;
  for (const auto& [node, fitness] : candidates_) {
    if (heard_.contains(node)) heard_[node][node] = fitness;  // a node knows its own bid
    sim::RandomStream jitter(router_.network().master_seed(), node, sim::StreamPurpose::Cooperation);
    for (std::uint8_t r = 0; r < params_.rounds; ++r) {
      const sim::SimTime when = at + r * slot + jitter.draw_range(0, slot / 2);
      sim.schedule(when, node, sim::EventKind::Traffic, [this, node, fitness, r] {
        router_.send(node, params_.group,
                     transport::AppMessage{transport::Opcode::Candidacy, node, r,
                                           encode_fitness(fitness)});
      });
    }
  }
  sim.schedule(at + params_.window, sim::kGlobalTarget, sim::EventKind::ControllerTick,
               [this] { conclude(); });
}

void LeaderElection::conclude() {
  finished_ = true;
  std::map<sim::NodeId, std::size_t> votes;
  for (sim::NodeId m : members_) {
    const auto choice = select_leader(heard_[m]);
    result_.choice[m] = choice;
    if (choice) {
      ++votes[*choice];
    } else {
      ++result_.undecided;
    }
  }
  std::size_t best = 0;
  for (const auto& [id, n] : votes) {
    if (n > best) {
      best = n;
      result_.leader = id;
    }
  }
  for (const auto& [m, choice] : result_.choice) {
    if (choice && choice != result_.leader) ++result_.disagreements;
  }
}

// ---------------------------------------------------------------------------

Recruitment::Recruitment(transport::AccessRouter& router, RecruitParams params)
    : router_(router), params_(params) {
  if (params_.k == 0) throw std::invalid_argument("recruitment needs k >= 1");
  if (!params_.group.is_subscribable() || !params_.formation_group.is_subscribable()) {
    throw std::invalid_argument("recruitment groups must be group or virtual addresses");
  }
}

void Recruitment::set_leader(sim::NodeId leader) {
  leader_ = leader;
  router_.on(leader, transport::Opcode::Volunteer,
             [this](const net::AccessMessage& m, const transport::AppMessage&) { on_volunteer(m); });
}

void Recruitment::add_member(sim::NodeId node, bool willing, sim::Duration reply_delay) {
  members_[node] = {willing, reply_delay};
  net::MeshNetwork& net = router_.network();
  if (!net.node(node).net.subscribed(params_.group, net.now() + 1)) net.subscribe(node, params_.group);
  router_.on(node, transport::Opcode::Recruit,
             [this, node](const net::AccessMessage& m, const transport::AppMessage&) {
               const auto [willing, delay] = members_.at(node);
               if (!willing || node == leader_) return;
               const mesh::Address leader_addr = m.src;
               router_.network().sim().schedule_in(
                   delay, node, sim::EventKind::Traffic, [this, node, leader_addr] {
                     router_.send(node, leader_addr,
                                  transport::AppMessage{transport::Opcode::Volunteer, node, 0, {}});
                   });
             });
  router_.on(node, transport::Opcode::Confirm,
             [this, node](const net::AccessMessage&, const transport::AppMessage& app) {
               const mesh::Address formation(static_cast<std::uint16_t>(app.arg));
               net::MeshNetwork& n = router_.network();
               if (!n.node(node).net.subscribed(formation, n.now() + 1)) n.subscribe(node, formation);
               joined_.insert(node);
             });
}

void Recruitment::start(sim::SimTime at) {
  if (!leader_) throw std::logic_error("recruitment started without a leader");
  deadline_ = at + params_.timeout;
  sim::Simulator& sim = router_.network().sim();
  sim.schedule(at, *leader_, sim::EventKind::Traffic, [this] {
    router_.send(*leader_, params_.group,
                 transport::AppMessage{transport::Opcode::Recruit, 0,
                                       static_cast<std::uint32_t>(params_.k), {}});
  });
  sim.schedule(deadline_, *leader_, sim::EventKind::Timer, [this] { decide(); });
}

void Recruitment::on_volunteer(const net::AccessMessage& m) {
  const auto from = router_.network().find_unicast(m.src);
  if (!from) return;
  if (finished_ || m.at > deadline_) {
    result_.late.push_back(*from);
    return;
  }
  volunteers_.push_back(Volunteer{m.at, *from});
  if (volunteers_.size() >= params_.k) decide();
}

void Recruitment::decide() {
  if (finished_) return;
  finished_ = true;
  std::sort(volunteers_.begin(), volunteers_.end());
  for (const Volunteer& v : volunteers_) {
    if (result_.confirmed.size() == params_.k) break;
    result_.confirmed.push_back(v.node);
    ++confirms_sent_;
    router_.send(*leader_, router_.network().node(v.node).config.unicast,
                 transport::AppMessage{transport::Opcode::Confirm, v.node,
                                       params_.formation_group.raw(), {}});
  }
  result_.partial = result_.confirmed.size() < params_.k;
}

}  // namespace meshsim::scenario
