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

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "meshsim/transport/access.hpp"

namespace meshsim::scenario {

/// Pure selection rule: highest fitness wins, lowest id breaks ties.
std::optional<sim::NodeId> select_leader(const std::map<sim::NodeId, double>& heard);

struct ElectionParams {
  mesh::Address group{0xC100};
  sim::Duration window = 2'000'000;
  // Each candidate bids once per slot of window / rounds, at a random point
  // in the first half of its slot, so simultaneous bids do not keep colliding.
  std::uint8_t rounds = 3;
};

struct ElectionResult {
  std::map<sim::NodeId, std::optional<sim::NodeId>> choice;  // per member
  std::optional<sim::NodeId> leader;   // most common choice, lowest id on ties
  std::size_t disagreements = 0;       // members whose choice differs from the majority
  std::size_t undecided = 0;
};

/// Every candidate publishes (id, fitness) to the election group; after
/// the window each member picks select_leader over what it heard.
class LeaderElection {
 public:
  LeaderElection(transport::AccessRouter& router, ElectionParams params);

  void add_member(sim::NodeId node);
  void add_candidate(sim::NodeId node, double fitness);
  void start(sim::SimTime at);

  [[nodiscard]] bool finished() const { return finished_; }
  [[nodiscard]] const ElectionResult& result() const { return result_; }
  [[nodiscard]] const std::map<sim::NodeId, double>& heard_by(sim::NodeId member) const {
    return heard_.at(member);
  }

 private:
  void conclude();

  transport::AccessRouter& router_;
  ElectionParams params_;
  std::vector<sim::NodeId> members_;
  std::map<sim::NodeId, double> candidates_;
  std::map<sim::NodeId, std::map<sim::NodeId, double>> heard_;
  ElectionResult result_;
  bool finished_ = false;
};

struct RecruitParams {
  mesh::Address group{0xC100};            // where RECRUIT goes
  mesh::Address formation_group{0xC200};  // what confirmed followers join
  std::size_t k = 2;
  sim::Duration timeout = 3'000'000;
};

struct RecruitResult {
  std::vector<sim::NodeId> confirmed;  // in confirmation order
  std::vector<sim::NodeId> late;       // volunteered after the deadline
  bool partial = false;
};

/// RECRUIT(k) to the group, unicast VOLUNTEER replies, first k confirmed.
class Recruitment {
 public:
  Recruitment(transport::AccessRouter& router, RecruitParams params);

  void set_leader(sim::NodeId leader);
  /// `reply_delay` postpones the VOLUNTEER after the RECRUIT arrives.
  void add_member(sim::NodeId node, bool willing, sim::Duration reply_delay = 0);
  void start(sim::SimTime at);

  [[nodiscard]] bool finished() const { return finished_; }
  [[nodiscard]] const RecruitResult& result() const { return result_; }
  [[nodiscard]] std::size_t confirms_sent() const { return confirms_sent_; }
  /// Members that received CONFIRM and joined the formation group.
  [[nodiscard]] const std::set<sim::NodeId>& joined() const { return joined_; }

 private:
  struct Volunteer {
    sim::SimTime at;
    sim::NodeId node;
    auto operator<=>(const Volunteer&) const = default;
  };

  void on_volunteer(const net::AccessMessage& m);
  void decide();

  transport::AccessRouter& router_;
  RecruitParams params_;
  std::optional<sim::NodeId> leader_;
  std::map<sim::NodeId, std::pair<bool, sim::Duration>> members_;
  std::vector<Volunteer> volunteers_;
  std::set<sim::NodeId> joined_;
  RecruitResult result_;
  sim::SimTime deadline_ = 0;
  std::size_t confirms_sent_ = 0;
  bool finished_ = false;
};

}  // namespace meshsim::scenario
