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

#include "meshsim/harness/run.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <set>

#include "meshsim/mesh/cache.hpp"
#include "meshsim/scenario/coverage.hpp"
#include "meshsim/scenario/formation.hpp"
#include "meshsim/scenario/topology.hpp"
#include "meshsim/transport/access.hpp"

namespace meshsim::harness {

namespace {

using transport::AppMessage;
using transport::ExchangeMode;
using transport::Opcode;

constexpr sim::Duration kRecruitGap = 100'000;   // election end to RECRUIT
constexpr sim::Duration kCommandGap = 500'000;   // recruitment deadline to first command

std::vector<sim::NodeId> with_role(const ScenarioConfig& cfg, std::string_view role) {
  std::vector<sim::NodeId> out;
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    if (cfg.nodes[i].role == role) out.push_back(static_cast<sim::NodeId>(i));
  }
  return out;
}

// One run's mutable world. Lives on the stack of run_scenario.
class Runner {
 public:
  explicit Runner(const ScenarioConfig& cfg)
      : cfg_(cfg),
        net_(cfg.seed, cfg.propagation, cfg.transport),
        router_(net_),
        acked_(router_, exchange_params(cfg)) {
    acked_.on_status = [this](const transport::Exchange& ex, const transport::RecipientOutcome&) {
      if (ex.mode == ExchangeMode::Unicast && ex.settled) settled(ex);
    };
    for (const NodeSpec& spec : cfg.nodes) {
      net::NodeConfig nc;
      nc.unicast = spec.address;
      nc.relay_enabled = spec.relay;
      nc.subscriptions = spec.subscriptions;
      nc.adv = cfg.adv;
      nc.scan = cfg.scan;
      nc.ext = cfg.ext;
      nc.ttl_initial_default = cfg.ttl;
      nc.position = spec.position;
      net_.add_node(std::move(nc));
    }
  }

  net::MeshNetwork& network() { return net_; }

  MetricsReport run() {
    const sim::Duration duration = cfg_.effective_duration();
    switch (cfg_.traffic.pattern) {
      case TrafficPattern::ControllerToCohorts: setup_cohorts(); break;
      case TrafficPattern::Pairs: setup_pairs(); break;
      case TrafficPattern::Flood: setup_flood(); break;
      case TrafficPattern::Coverage: setup_coverage(); break;
      case TrafficPattern::Formation: setup_formation(); break;
    }
    setup_mobility(duration);
    setup_rssi(duration);

    const sim::RunSummary summary = net_.sim().run(duration);

    MetricsReport report;
    report.scenario = cfg_.scenario;
    report.variant = cfg_.variant;
    report.seed = cfg_.seed;
    report.metric = metric_for(cfg_);
    collect_rows(report);
    collect_drops(report);
    report.rssi = std::move(rssi_);
    collect_outcomes(report);

    report.manifest = {{"config", to_json(cfg_)},
                       {"constants", constants_table()},
                       {"calibration", cfg_.calibration},
                       {"metric", report.metric},
                       {"run",
                        {{"events_processed", summary.events_processed},
                         {"end_clock_us", summary.clock},
                         {"event_digest", summary.log_digest}}}};
    return report;
  }

 private:
  static transport::ExchangeParams exchange_params(const ScenarioConfig& cfg) {
    transport::ExchangeParams p = cfg.exchange;
    if (!p.ttl) p.ttl = cfg.ttl;
    return p;
  }

  sim::SimTime iteration_time(std::uint32_t i) const {
    return cfg_.traffic.start + static_cast<sim::Duration>(i) * cfg_.traffic.period;
  }

  void at(sim::SimTime t, std::function<void()> action) {
    net_.sim().schedule(t, sim::kGlobalTarget, sim::EventKind::Traffic, std::move(action));
  }

  void add_link(sim::NodeId a, sim::NodeId b) {
    if (a == b) return;
    links_.insert({std::min(a, b), std::max(a, b)});
  }

  // -- traffic patterns --------------------------------------------------

  // Acked unicast with an optional cap on open exchanges per client.
  void dispatch(sim::NodeId client, mesh::Address dst, sim::NodeId server) {
    Client& c = clients_[client];
    if (cfg_.traffic.max_outstanding != 0 && c.open >= cfg_.traffic.max_outstanding) {
      c.waiting.push_back({dst, server});
      return;
    }
    ++c.open;
    acked_.send(client, dst, ExchangeMode::Unicast, {server});
  }

  void settled(const transport::Exchange& ex) {
    Client& c = clients_[ex.client];
    --c.open;
    if (c.waiting.empty()) return;
    const auto [dst, server] = c.waiting.front();
    c.waiting.pop_front();
    ++c.open;
    acked_.send(ex.client, dst, ExchangeMode::Unicast, {server});
  }

  void setup_cohorts() {
    const sim::NodeId controller = with_role(cfg_, "controller").front();
    const auto servers = with_role(cfg_, "server");
    for (sim::NodeId s : servers) {
      acked_.serve(s);
      add_link(controller, s);
    }
    std::map<std::string, std::vector<sim::NodeId>> by_cohort;
    for (sim::NodeId s : servers) by_cohort[cfg_.nodes[s].cohort].push_back(s);

    // Cohorts are exercised one after another, each for the full number of
    // iterations, so their traffic never overlaps.
    sim::Duration phase = 0;
    for (const auto& [cohort, members] : by_cohort) {
      for (std::uint32_t i = 0; i < cfg_.traffic.iterations; ++i) {
        at(iteration_time(i) + phase, [this, controller, cohort, members] {
          if (cfg_.traffic.mode == ExchangeMode::Unicast) {
            for (sim::NodeId s : members) dispatch(controller, cfg_.nodes[s].address, s);
          } else {
            acked_.send(controller, cfg_.cohort_groups.at(cohort), ExchangeMode::Group, members);
          }
        });
      }
      phase += static_cast<sim::Duration>(cfg_.traffic.iterations) * cfg_.traffic.period;
    }
  }

  void setup_pairs() {
    const auto senders = with_role(cfg_, "sender");
    std::set<sim::NodeId> served;
    for (sim::NodeId s : senders) {
      const auto peer = static_cast<sim::NodeId>(*cfg_.nodes[s].peer);
      if (served.insert(peer).second) acked_.serve(peer);
      add_link(s, peer);
    }
    for (std::uint32_t i = 0; i < cfg_.traffic.iterations; ++i) {
      at(iteration_time(i), [this, senders] {
        for (sim::NodeId s : senders) {
          const auto peer = static_cast<sim::NodeId>(*cfg_.nodes[s].peer);
          const NodeSpec& dst = cfg_.nodes[peer];
          if (cfg_.traffic.mode == ExchangeMode::Unicast) {
            dispatch(s, dst.address, peer);
          } else {
            acked_.send(s, cfg_.cohort_groups.at(dst.cohort), ExchangeMode::Group, {peer});
          }
        }
      });
    }
  }

  void setup_flood() {
    source_ = with_role(cfg_, "source").front();
    for (std::size_t i = 0; i < cfg_.nodes.size(); ++i) {
      const auto id = static_cast<sim::NodeId>(i);
      if (id == source_) continue;
      const NodeSpec& spec = cfg_.nodes[i];
      if (std::find(spec.subscriptions.begin(), spec.subscriptions.end(), cfg_.traffic.group) ==
          spec.subscriptions.end()) {
        continue;
      }
      flood_members_.push_back(id);
      add_link(source_, id);
      router_.on(id, Opcode::Data, [this, id](const net::AccessMessage& m, const AppMessage& app) {
        auto& slot = flood_rx_[{app.msg_id, id}];
        if (slot.first) return;
        slot = {m.at, static_cast<std::uint8_t>(cfg_.ttl - m.ttl)};
      });
    }
    for (std::uint32_t i = 0; i < cfg_.traffic.iterations; ++i) {
      at(iteration_time(i), [this, i] {
        const std::uint32_t id = i + 1;
        flood_published_.push_back({id, net_.now()});
        net::SendOptions opts;
        opts.ttl = cfg_.ttl;
        router_.send(source_, cfg_.traffic.group, AppMessage{Opcode::Data, id, 0, {}},
                     cfg_.exchange.message_size, std::move(opts));
      });
    }
  }

  void setup_coverage() {
    coverage_ = std::make_unique<scenario::CoverageController>(router_, cfg_.coverage,
                                                               cfg_.cohort_groups.at("beacons"));
    for (std::size_t i = 0; i < cfg_.nodes.size(); ++i) {
      const auto id = static_cast<sim::NodeId>(i);
      coverage_->add(id, cfg_.nodes[i].role == "mobile");
      for (std::size_t j = i + 1; j < cfg_.nodes.size(); ++j) {
        add_link(id, static_cast<sim::NodeId>(j));
      }
    }
    coverage_->start(cfg_.traffic.start);
  }

  void setup_formation() {
    election_ = std::make_unique<scenario::LeaderElection>(router_, cfg_.election);
    recruit_ = std::make_unique<scenario::Recruitment>(router_, cfg_.recruit);
    for (std::size_t i = 0; i < cfg_.nodes.size(); ++i) {
      const auto id = static_cast<sim::NodeId>(i);
      election_->add_member(id);
      if (cfg_.nodes[i].role == "candidate") election_->add_candidate(id, cfg_.nodes[i].fitness);
      acked_.serve(id);
      for (std::size_t j = i + 1; j < cfg_.nodes.size(); ++j) {
        add_link(id, static_cast<sim::NodeId>(j));
      }
    }
    election_->start(cfg_.traffic.start);

    const sim::SimTime t_recruit = cfg_.traffic.start + cfg_.election.window + kRecruitGap;
    at(t_recruit, [this] {
      const auto leader = election_->result().leader;
      if (!leader) return;
      recruit_->set_leader(*leader);
      for (std::size_t i = 0; i < cfg_.nodes.size(); ++i) {
        const auto id = static_cast<sim::NodeId>(i);
        if (id != *leader) recruit_->add_member(id, cfg_.nodes[i].willing);
      }
      recruit_->start(net_.now());
    });

    const sim::SimTime t_first = t_recruit + cfg_.recruit.timeout + kCommandGap;
    for (std::uint32_t i = 0; i < cfg_.traffic.iterations; ++i) {
      at(t_first + static_cast<sim::Duration>(i) * cfg_.traffic.period, [this] {
        const auto leader = election_->result().leader;
        if (!leader || recruit_->result().confirmed.empty()) return;
        acked_.send(*leader, cfg_.recruit.formation_group, cfg_.traffic.mode,
                    recruit_->result().confirmed);
      });
    }
  }

  // -- background processes ----------------------------------------------

  void setup_mobility(sim::Duration duration) {
    for (std::size_t i = 0; i < cfg_.nodes.size(); ++i) {
      if (std::holds_alternative<scenario::Static>(cfg_.nodes[i].mobility)) continue;
      const auto id = static_cast<sim::NodeId>(i);
      walkers_.push_back({id, cfg_.nodes[i].mobility,
                          sim::derive_stream(cfg_.seed, id, sim::StreamPurpose::Mobility)});
    }
    if (walkers_.empty()) return;
    for (sim::SimTime t = cfg_.mobility_tick; t <= duration; t += cfg_.mobility_tick) {
      net_.sim().schedule(t, sim::kGlobalTarget, sim::EventKind::MobilityTick, [this] {
        for (Walker& w : walkers_) {
          const radio::Position next =
              scenario::step_mobility(w.model, net_.position(w.node), cfg_.mobility_tick, w.stream);
          net_.set_position(w.node, next);
        }
      });
    }
  }

  void setup_rssi(sim::Duration duration) {
    if (links_.empty() || cfg_.rssi_period == 0) return;
    for (sim::SimTime t = 0; t <= duration; t += cfg_.rssi_period) {
      net_.sim().schedule(t, sim::kGlobalTarget, sim::EventKind::Generic, [this] {
        for (const auto& [a, b] : links_) rssi_.push_back({net_.now(), a, b, net_.rssi(a, b)});
      });
    }
  }

  // -- results ----------------------------------------------------------

  std::string addr(sim::NodeId id) const { return cfg_.nodes.at(id).address.str(); }

  void collect_rows(MetricsReport& report) const {
    const bool round_trip = report.metric == "rtt";
    if (cfg_.traffic.pattern == TrafficPattern::Flood) {
      for (const auto& [msg_id, t_pub] : flood_published_) {
        for (sim::NodeId m : flood_members_) {
          MessageRow row;
          row.msg_id = msg_id;
          row.src = addr(source_);
          row.dst = addr(m);
          row.mode = "flood";
          row.t_publish = t_pub;
          row.cohort = cfg_.nodes[m].cohort;
          if (auto it = flood_rx_.find({msg_id, m}); it != flood_rx_.end()) {
            row.t_deliver = it->second.first;
            row.ttl_spent = it->second.second;
            row.delivered = true;
          }
          report.rows.push_back(std::move(row));
        }
      }
      return;
    }
    for (const transport::Exchange& ex : acked_.exchanges()) {
      for (const transport::RecipientOutcome& r : ex.recipients) {
        MessageRow row;
        row.msg_id = ex.msg_id;
        row.src = addr(ex.client);
        row.dst = r.addr.str();
        row.mode = std::string(transport::to_string(ex.mode));
        row.t_publish = ex.t_publish;
        row.t_deliver = r.t_deliver;
        if (r.t_status) row.rtt = *r.t_status - ex.t_publish;
        row.ttl_spent = r.ttl_spent;
        row.cohort = cfg_.nodes.at(r.node).cohort;
        // Acked unicast counts a returned status; everything else counts
        // the command reaching the recipient.
        row.delivered = round_trip && ex.mode == ExchangeMode::Unicast ? r.t_status.has_value()
                                                                       : r.t_deliver.has_value();
        report.rows.push_back(std::move(row));
      }
    }
  }

  void collect_drops(MetricsReport& report) const {
    for (sim::NodeId id = 0; id < net_.size(); ++id) {
      const net::Node& n = net_.node(id);
      auto put = [&](std::string_view reason, std::uint64_t count) {
        if (count > 0) report.drops.push_back({id, std::string(reason), count});
      };
      for (std::size_t r = 0; r < net::kDropReasonCount; ++r) {
        put(net::to_string(static_cast<net::DropReason>(r)), n.net.drops()[r]);
      }
      for (std::size_t r = 0; r < n.misses.size(); ++r) {
        put(radio::to_string(static_cast<radio::MissReason>(r)), n.misses[r]);
      }
      put("queue_overflow", n.bearer->counters().dropped_overflow);
      put("reassembly_timeout", n.reassembly_timeouts);
    }
  }

  void collect_outcomes(MetricsReport& report) const {
    nlohmann::json& o = report.outcomes;
    o["access_delivered"] = router_.delivered();
    o["access_malformed"] = router_.malformed();
    std::uint64_t command_tx = 0;
    std::size_t settled = 0;
    for (const transport::Exchange& ex : acked_.exchanges()) {
      command_tx += ex.command_tx;
      if (ex.settled) ++settled;
    }
    o["exchanges"] = acked_.exchanges().size();
    o["exchanges_settled"] = settled;
    o["command_transmissions"] = command_tx;
    if (coverage_) {
      nlohmann::json c;
      c["ticks"] = coverage_->ticks();
      c["moves"] = coverage_->moves();
      c["converged_at_tick"] =
          coverage_->converged_at() ? nlohmann::json(*coverage_->converged_at()) : nlohmann::json();
      nlohmann::json nodes = nlohmann::json::array();
      for (sim::NodeId id = 0; id < net_.size(); ++id) {
        const radio::Position& p = net_.position(id);
        nodes.push_back({{"node", id},
                         {"degree", coverage_->degree(id)},
                         {"x", p.x},
                         {"y", p.y}});
      }
      c["nodes"] = nodes;
      o["coverage"] = c;
    }
    if (election_) {
      const scenario::ElectionResult& e = election_->result();
      nlohmann::json el;
      el["leader"] = e.leader ? nlohmann::json(*e.leader) : nlohmann::json();
      el["disagreements"] = e.disagreements;
      el["undecided"] = e.undecided;
      o["election"] = el;
      const scenario::RecruitResult& r = recruit_->result();
      o["recruitment"] = {{"confirmed", r.confirmed},
                          {"late", r.late},
                          {"partial", r.partial},
                          {"confirms_sent", recruit_->confirms_sent()},
                          {"joined", std::vector<sim::NodeId>(recruit_->joined().begin(),
                                                              recruit_->joined().end())}};
    }
  }

  struct Client {
    std::uint32_t open = 0;
    std::deque<std::pair<mesh::Address, sim::NodeId>> waiting;
  };

  struct Walker {
    sim::NodeId node;
    scenario::MobilityModel model;
    sim::RandomStream stream;
  };

  const ScenarioConfig& cfg_;
  net::MeshNetwork net_;
  transport::AccessRouter router_;
  transport::AckedMessaging acked_;
  std::set<std::pair<sim::NodeId, sim::NodeId>> links_;
  std::vector<RssiSample> rssi_;
  std::vector<Walker> walkers_;
  std::map<sim::NodeId, Client> clients_;

  sim::NodeId source_ = 0;
  std::vector<sim::NodeId> flood_members_;
  std::vector<std::pair<std::uint32_t, sim::SimTime>> flood_published_;
  std::map<std::pair<std::uint32_t, sim::NodeId>, std::pair<sim::SimTime, std::uint8_t>> flood_rx_;

  std::unique_ptr<scenario::CoverageController> coverage_;
  std::unique_ptr<scenario::LeaderElection> election_;
  std::unique_ptr<scenario::Recruitment> recruit_;
};

}  // namespace

std::string metric_for(const ScenarioConfig& cfg) {
  switch (cfg.traffic.pattern) {
    case TrafficPattern::ControllerToCohorts:
    case TrafficPattern::Formation:
      return "rtt";
    case TrafficPattern::Pairs:
    case TrafficPattern::Flood:
    case TrafficPattern::Coverage:
      return "latency";
  }
  return "rtt";
}

nlohmann::json constants_table() {
  return {{"max_ttl", mesh::kMaxTtl},
          {"max_seq", mesh::kMaxSeq},
          {"max_legacy_transport_payload", mesh::kMaxLegacyTransportPayload},
          {"max_extended_transport_payload", mesh::kMaxExtendedTransportPayload},
          {"cache_capacity", mesh::MessageCache::kDefaultCapacity},
          {"segment_size", transport::kSegmentSize},
          {"max_segments", transport::kMaxSegments},
          {"app_header_bytes", transport::kAppHeaderBytes},
          {"primary_channels", {37, 38, 39}},
          {"office_target_hop_diameter", scenario::kOfficeTargetDiameter},
          {"office_floor_penalty_search_db", scenario::kOfficeFloorPenaltySearchDb},
          {"office_floor_penalty_step_db", scenario::kOfficeFloorPenaltyStepDb},
          {"time_unit", "us"},
          {"percentiles", "nearest-rank"}};
}

MetricsReport run_scenario(const ScenarioConfig& cfg, const RunHooks& hooks) {
  if (auto errors = validate(cfg); !errors.empty()) throw ConfigError(std::move(errors));
  Runner runner(cfg);
  if (hooks.on_network) hooks.on_network(runner.network());
  return runner.run();
}

}  // namespace meshsim::harness
