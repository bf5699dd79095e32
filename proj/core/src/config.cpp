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

#include "meshsim/harness/config.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "meshsim/harness/library.hpp"

namespace meshsim::harness {

using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "invalid scenario config:";
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

std::string describe(const json& j) {
  std::string s = j.dump();
  if (s.size() > 40) s = s.substr(0, 37) + "...";
  return s;
}

// Reads typed fields out of one JSON object, collecting errors with their
// full path and flagging keys nobody asked for.
class Reader {
 public:
  Reader(const json* obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (obj_ != nullptr && !obj_->is_object()) {
      fail("", "expected an object, got " + describe(*obj_));
      obj_ = nullptr;
    }
  }

  [[nodiscard]] bool present() const { return obj_ != nullptr; }
  [[nodiscard]] bool has(const std::string& key) const {
    return obj_ != nullptr && obj_->contains(key);
  }
  const json* raw(const std::string& key) {
    if (!has(key)) return nullptr;
    seen_.insert(key);
    return &obj_->at(key);
  }

  Reader child(const std::string& key) { return Reader(raw(key), at(key), errors_); }
  [[nodiscard]] std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void fail(const std::string& key, const std::string& msg) {
    errors_.push_back((key.empty() ? (path_.empty() ? std::string("<root>") : path_) : at(key)) +
                      ": " + msg);
  }

  void read(const std::string& key, double& out) {
    if (const json* v = raw(key)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(key, "expected a number, got " + describe(*v));
      }
    }
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = raw(key)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        fail(key, "expected true or false, got " + describe(*v));
      }
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = raw(key)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        fail(key, "expected a string, got " + describe(*v));
      }
    }
  }

  template <typename U>
    requires std::is_unsigned_v<U>
  void read(const std::string& key, U& out) {
    if (const json* v = raw(key)) {
      if (v->is_number_unsigned() ||
          (v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
        const auto value = v->get<std::uint64_t>();
        if (value > std::numeric_limits<U>::max()) {
          fail(key, "value " + std::to_string(value) + " is out of range");
        } else {
          out = static_cast<U>(value);
        }
      } else {
        fail(key, "expected a non-negative integer, got " + describe(*v));
      }
    }
  }

  void read(const std::string& key, int& out) {
    if (const json* v = raw(key)) {
      if (v->is_number_integer()) {
        out = v->get<int>();
      } else {
        fail(key, "expected an integer, got " + describe(*v));
      }
    }
  }

  void read_optional(const std::string& key, std::optional<double>& out) {
    if (const json* v = raw(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(key, "expected a number or null, got " + describe(*v));
      }
    }
  }

  void read(const std::string& key, mesh::Address& out) {
    if (const json* v = raw(key)) parse_address(*v, at(key), out);
  }

  void parse_address(const json& v, const std::string& path, mesh::Address& out) {
    try {
      if (v.is_string()) {
        out = mesh::Address::parse(v.get<std::string>());
        return;
      }
      if (v.is_number_unsigned() && v.get<std::uint64_t>() <= 0xFFFF) {
        out = mesh::Address(static_cast<std::uint16_t>(v.get<std::uint64_t>()));
        return;
      }
    } catch (const std::exception&) {
    }
    errors_.push_back(path + ": malformed address " + describe(v));
  }

  void read(const std::string& key, std::vector<mesh::Address>& out) {
    if (const json* v = raw(key)) {
      if (!v->is_array()) {
        fail(key, "expected an array of addresses");
        return;
      }
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        mesh::Address a;
        parse_address((*v)[i], at(key) + "[" + std::to_string(i) + "]", a);
        out.push_back(a);
      }
    }
  }

  void read(const std::string& key, radio::Position& out) {
    if (const json* v = raw(key)) parse_position(*v, at(key), out);
  }

  void parse_position(const json& v, const std::string& path, radio::Position& out) {
    if (v.is_array() && (v.size() == 2 || v.size() == 3) && v[0].is_number() && v[1].is_number() &&
        (v.size() == 2 || v[2].is_number_integer())) {
      out.x = v[0].get<double>();
      out.y = v[1].get<double>();
      out.floor = v.size() == 3 ? v[2].get<int>() : 0;
      return;
    }
    errors_.push_back(path + ": expected [x, y] or [x, y, floor], got " + describe(v));
  }

  template <typename E, typename Parse>
  void read_enum(const std::string& key, E& out, Parse parse, const std::string& choices) {
    if (const json* v = raw(key)) {
      if (v->is_string()) {
        if (auto e = parse(v->get<std::string>())) {
          out = *e;
          return;
        }
      }
      fail(key, "expected one of " + choices + ", got " + describe(*v));
    }
  }

  /// Reports keys that were never read.
  void finish() {
    if (obj_ == nullptr) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!seen_.contains(key)) fail(key, "unknown field");
    }
  }

 private:
  const json* obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

std::optional<transport::ExchangeMode> parse_mode(std::string_view s) {
  if (s == "unicast") return transport::ExchangeMode::Unicast;
  if (s == "group") return transport::ExchangeMode::Group;
  return std::nullopt;
}

void read_mobility(Reader& parent, const std::string& key, scenario::MobilityModel& out) {
  Reader r = parent.child(key);
  if (!r.present()) return;
  std::string model = "static";
  r.read("model", model);
  if (model == "static") {
    out = scenario::Static{};
  } else if (model == "random_waypoint") {
    scenario::RandomWaypoint rw;
    if (const json* b = r.raw("bounds")) {
      if (b->is_array() && b->size() == 4 && std::all_of(b->begin(), b->end(),
                                                         [](const json& x) { return x.is_number(); })) {
        rw.bounds = {(*b)[0].get<double>(), (*b)[1].get<double>(), (*b)[2].get<double>(),
                     (*b)[3].get<double>()};
      } else {
        r.fail("bounds", "expected [x_min, y_min, x_max, y_max]");
      }
    }
    r.read("speed_mps", rw.speed_mps);
    r.read("pause_us", rw.pause);
    out = rw;
  } else if (model == "back_and_forth") {
    scenario::BackAndForth bf;
    r.read("p0", bf.p0);
    r.read("p1", bf.p1);
    r.read("speed_mps", bf.speed_mps);
    out = bf;
  } else {
    r.fail("model", "expected static, random_waypoint or back_and_forth, got \"" + model + "\"");
  }
  r.finish();
}

json mobility_json(const scenario::MobilityModel& m) {
  json j{{"model", scenario::mobility_name(m)}};
  if (const auto* rw = std::get_if<scenario::RandomWaypoint>(&m)) {
    j["bounds"] = {rw->bounds.x_min, rw->bounds.y_min, rw->bounds.x_max, rw->bounds.y_max};
    j["speed_mps"] = rw->speed_mps;
    j["pause_us"] = rw->pause;
  } else if (const auto* bf = std::get_if<scenario::BackAndForth>(&m)) {
    j["p0"] = {bf->p0.x, bf->p0.y, bf->p0.floor};
    j["p1"] = {bf->p1.x, bf->p1.y, bf->p1.floor};
    j["speed_mps"] = bf->speed_mps;
  }
  return j;
}

void read_parameters(Reader& root, ScenarioConfig& cfg) {
  root.read("ttl", cfg.ttl);
  root.read("duration_us", cfg.duration);
  root.read("mobility_tick_us", cfg.mobility_tick);
  root.read("rssi_period_us", cfg.rssi_period);

  Reader p = root.child("propagation");
  p.read("tx_power_dbm", cfg.propagation.tx_power_dbm);
  p.read("pl0_db", cfg.propagation.pl0_db);
  p.read("path_loss_exponent", cfg.propagation.path_loss_exponent);
  p.read("floor_penalty_db", cfg.propagation.floor_penalty_db);
  p.read("shadowing_sigma_db", cfg.propagation.shadowing_sigma_db);
  p.read("sensitivity_dbm", cfg.propagation.sensitivity_dbm);
  p.read_optional("capture_margin_db", cfg.propagation.capture_margin_db);
  p.read("background_loss_prob", cfg.propagation.background_loss_prob);
  p.finish();

  Reader a = root.child("adv");
  a.read("adv_interval_us", cfg.adv.adv_interval);
  a.read("adv_delay_max_us", cfg.adv.adv_delay_max);
  a.read("inter_channel_gap_us", cfg.adv.inter_channel_gap);
  a.read("n_events_source", cfg.adv.n_events_source);
  a.read("n_events_relay", cfg.adv.n_events_relay);
  a.read("queue_depth", cfg.adv.queue_depth);
  a.finish();

  Reader s = root.child("scan");
  s.read("scan_interval_us", cfg.scan.scan_interval);
  s.read("scan_window_us", cfg.scan.scan_window);
  s.read_enum("mode", cfg.scan.mode, bearer::parse_scan_mode, "rotate, all_channels");
  s.finish();

  Reader e = root.child("ext");
  e.read("enabled", cfg.ext.enabled);
  e.read("aux_offset_us", cfg.ext.aux_offset);
  e.read_enum("data_phy", cfg.ext.data_phy, radio::parse_phy, "1M, 2M, coded500k, coded125k");
  e.read("ext_ind_bytes", cfg.ext.ext_ind_bytes);
  e.finish();

  Reader t = root.child("transport");
  t.read("segment_retry_us", cfg.transport.segment_retry);
  t.read("max_block_retries", cfg.transport.max_block_retries);
  t.read("ack_timer_us", cfg.transport.ack_timer);
  t.read("reassembly_timeout_us", cfg.transport.reassembly_timeout);
  t.finish();

  Reader x = root.child("exchange");
  x.read("retry_initial_us", cfg.exchange.retry_initial);
  x.read("retry_cap_us", cfg.exchange.retry_cap);
  x.read("group_events", cfg.exchange.group_events);
  x.read("status_events", cfg.exchange.status_events);
  x.read("group_status_retries", cfg.exchange.group_status_retries);
  x.read("status_size", cfg.exchange.status_size);
  x.finish();

  Reader tr = root.child("traffic");
  tr.read_enum("pattern", cfg.traffic.pattern, parse_pattern,
               "controller_to_cohorts, pairs, flood, coverage, formation");
  tr.read_enum("mode", cfg.traffic.mode, parse_mode, "unicast, group");
  tr.read("message_size", cfg.exchange.message_size);
  tr.read("iterations", cfg.traffic.iterations);
  tr.read("period_us", cfg.traffic.period);
  tr.read("start_us", cfg.traffic.start);
  tr.read("drain_us", cfg.traffic.drain);
  tr.read("group", cfg.traffic.group);
  tr.read("max_outstanding", cfg.traffic.max_outstanding);
  tr.finish();

  Reader c = root.child("coverage");
  c.read("rssi_threshold_dbm", cfg.coverage.rssi_threshold_dbm);
  c.read("target_degree", cfg.coverage.target_degree);
  c.read("beacon_period_us", cfg.coverage.beacon_period);
  c.read("move_step_m", cfg.coverage.move_step_m);
  c.finish();

  Reader el = root.child("election");
  el.read("group", cfg.election.group);
  el.read("window_us", cfg.election.window);
  el.read("rounds", cfg.election.rounds);
  el.finish();

  Reader rc = root.child("recruit");
  rc.read("group", cfg.recruit.group);
  rc.read("formation_group", cfg.recruit.formation_group);
  rc.read("k", cfg.recruit.k);
  rc.read("timeout_us", cfg.recruit.timeout);
  rc.finish();

  if (const json* groups = root.raw("cohort_groups")) {
    if (!groups->is_object()) {
      root.fail("cohort_groups", "expected an object of cohort name -> group address");
    } else {
      for (const auto& [name, v] : groups->items()) {
        mesh::Address a;
        root.parse_address(v, root.at("cohort_groups") + "." + name, a);
        cfg.cohort_groups[name] = a;
      }
    }
  }
}

void read_nodes(Reader& root, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  const json* nodes = root.raw("nodes");
  if (nodes == nullptr) return;
  if (!nodes->is_array()) {
    root.fail("nodes", "expected an array");
    return;
  }
  cfg.nodes.clear();
  for (std::size_t i = 0; i < nodes->size(); ++i) {
    Reader n(&(*nodes)[i], "nodes[" + std::to_string(i) + "]", errors);
    NodeSpec spec;
    spec.address = mesh::unicast_for_index(static_cast<std::uint32_t>(i));
    n.read("role", spec.role);
    n.read("address", spec.address);
    n.read("position", spec.position);
    n.read("relay", spec.relay);
    n.read("subscriptions", spec.subscriptions);
    n.read("cohort", spec.cohort);
    if (n.has("peer")) {
      std::size_t peer = 0;
      n.read("peer", peer);
      spec.peer = peer;
    }
    read_mobility(n, "mobility", spec.mobility);
    n.read("fitness", spec.fitness);
    n.read("willing", spec.willing);
    n.finish();
    cfg.nodes.push_back(std::move(spec));
  }
}

const std::set<std::string>& known_roles() {
  static const std::set<std::string> roles{"controller", "server", "sender",  "receiver",
                                           "source",     "member", "relay",   "mobile",
                                           "candidate"};
  return roles;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

std::string_view to_string(TrafficPattern p) {
  switch (p) {
    case TrafficPattern::ControllerToCohorts: return "controller_to_cohorts";
    case TrafficPattern::Pairs: return "pairs";
    case TrafficPattern::Flood: return "flood";
    case TrafficPattern::Coverage: return "coverage";
    case TrafficPattern::Formation: return "formation";
  }
  return "unknown";
}

std::optional<TrafficPattern> parse_pattern(std::string_view text) {
  for (auto p : {TrafficPattern::ControllerToCohorts, TrafficPattern::Pairs, TrafficPattern::Flood,
                 TrafficPattern::Coverage, TrafficPattern::Formation}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

sim::Duration ScenarioConfig::effective_duration() const {
  if (duration != 0) return duration;
  sim::Duration total = traffic.start +
                        static_cast<sim::Duration>(traffic.iterations) * traffic.period +
                        traffic.drain;
  // Controller traffic visits each server cohort in its own phase.
  if (traffic.pattern == TrafficPattern::ControllerToCohorts) {
    std::set<std::string> cohorts;
    for (const NodeSpec& n : nodes) {
      if (n.role == "server") cohorts.insert(n.cohort);
    }
    if (cohorts.size() > 1) {
      total += static_cast<sim::Duration>(cohorts.size() - 1) * traffic.iterations * traffic.period;
    }
  }
  // Formation commands start only after the election and recruitment.
  if (traffic.pattern == TrafficPattern::Formation) {
    total += election.window + recruit.timeout + 600'000;
  }
  return total;
}

ScenarioConfig load_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  std::vector<std::string> errors;
  Reader root(&doc, "", errors);
  if (!root.present()) throw ConfigError(errors);

  ScenarioConfig cfg;
  root.read("scenario", cfg.scenario);
  root.read("variant", cfg.variant);
  root.read("seed", cfg.seed);
  if (seed_override) cfg.seed = *seed_override;

  const auto& keys = scenario_keys();
  if (!root.has("scenario")) {
    errors.push_back("scenario: required field is missing");
    throw ConfigError(errors);
  }
  if (std::find(keys.begin(), keys.end(), cfg.scenario) == keys.end()) {
    std::string list;
    for (const auto& k : keys) list += (list.empty() ? "" : ", ") + k;
    errors.push_back("scenario: unknown scenario \"" + cfg.scenario + "\" (known: " + list + ")");
    throw ConfigError(errors);
  }
  const auto variants = scenario_variants(cfg.scenario);
  if (cfg.variant.empty() && !variants.empty()) cfg.variant = variants.front();
  if (!cfg.variant.empty() &&
      std::find(variants.begin(), variants.end(), cfg.variant) == variants.end()) {
    std::string list;
    for (const auto& v : variants) list += (list.empty() ? "" : ", ") + v;
    errors.push_back("variant: \"" + cfg.variant + "\" is not a variant of " + cfg.scenario +
                     (list.empty() ? " (it has none)" : " (expected " + list + ")"));
    throw ConfigError(errors);
  }

  apply_scenario_defaults(cfg);
  read_parameters(root, cfg);
  read_nodes(root, cfg, errors);
  root.finish();
  if (!errors.empty()) throw ConfigError(errors);

  if (!doc.contains("nodes")) build_roster(cfg);
  if (auto problems = validate(cfg); !problems.empty()) throw ConfigError(problems);
  return cfg;
}

ScenarioConfig make_config(const std::string& key, std::uint64_t seed, const std::string& variant) {
  json doc{{"scenario", key}, {"seed", seed}};
  if (!variant.empty()) doc["variant"] = variant;
  return load_config(doc);
}

std::vector<std::string> validate(const ScenarioConfig& cfg) {
  std::vector<std::string> errors;
  auto check = [&](const std::string& path, const std::optional<std::string>& err) {
    if (err) errors.push_back(path + ": " + *err);
  };
  check("propagation", cfg.propagation.validate());
  check("adv", cfg.adv.validate());
  check("scan", cfg.scan.validate());
  if (cfg.ext.enabled) check("ext", cfg.ext.validate(cfg.adv));
  check("coverage", cfg.coverage.validate());
  if (cfg.ttl > mesh::kMaxTtl) errors.push_back("ttl: must be <= 127");
  if (cfg.traffic.iterations < 1) errors.push_back("traffic.iterations: must be >= 1");
  if (cfg.traffic.period == 0) errors.push_back("traffic.period_us: must be > 0");
  if (cfg.mobility_tick == 0) errors.push_back("mobility_tick_us: must be > 0");
  if (cfg.rssi_period == 0) errors.push_back("rssi_period_us: must be > 0");
  const std::size_t max_payload =
      cfg.ext.enabled ? mesh::kMaxExtendedTransportPayload : transport::kMaxSegmentedPayload;
  if (cfg.exchange.message_size < transport::kAppHeaderBytes ||
      cfg.exchange.message_size > max_payload) {
    errors.push_back("traffic.message_size: must be within [" +
                     std::to_string(transport::kAppHeaderBytes) + ", " +
                     std::to_string(max_payload) + "]");
  }
  if (cfg.exchange.status_size < transport::kAppHeaderBytes ||
      cfg.exchange.status_size > max_payload) {
    errors.push_back("exchange.status_size: must be within [" +
                     std::to_string(transport::kAppHeaderBytes) + ", " +
                     std::to_string(max_payload) + "]");
  }
  if (cfg.exchange.retry_initial == 0 || cfg.exchange.retry_cap < cfg.exchange.retry_initial) {
    errors.push_back("exchange: retry backoff must satisfy 0 < retry_initial_us <= retry_cap_us");
  }
  if (cfg.exchange.group_events == 0) errors.push_back("exchange.group_events: must be >= 1");
  if (cfg.exchange.status_events == 0) errors.push_back("exchange.status_events: must be >= 1");
  if (!cfg.traffic.group.is_subscribable()) {
    errors.push_back("traffic.group: must be a group or virtual address");
  }
  if (cfg.election.rounds == 0 || cfg.election.window < cfg.election.rounds) {
    errors.push_back("election.rounds: must be >= 1 and no more than window_us");
  }
  if (!cfg.election.group.is_subscribable()) {
    errors.push_back("election.group: must be a group or virtual address");
  }
  if (!cfg.recruit.group.is_subscribable() || !cfg.recruit.formation_group.is_subscribable()) {
    errors.push_back("recruit: group addresses must be group or virtual");
  }
  if (cfg.recruit.k == 0) errors.push_back("recruit.k: must be >= 1");
  for (const auto& [name, addr] : cfg.cohort_groups) {
    if (!addr.is_subscribable()) {
      errors.push_back("cohort_groups." + name + ": must be a group or virtual address");
    }
  }

  if (cfg.nodes.empty()) errors.push_back("nodes: roster is empty");
  std::set<std::uint16_t> seen;
  std::size_t controllers = 0;
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    const NodeSpec& n = cfg.nodes[i];
    const std::string path = "nodes[" + std::to_string(i) + "]";
    if (!known_roles().contains(n.role)) {
      errors.push_back(path + ".role: unknown role \"" + n.role + "\"");
    }
    if (!n.address.is_unicast()) {
      errors.push_back(path + ".address: " + n.address.str() + " is not a unicast address");
    } else if (!seen.insert(n.address.raw()).second) {
      errors.push_back(path + ".address: duplicate address " + n.address.str());
    }
    for (std::size_t s = 0; s < n.subscriptions.size(); ++s) {
      if (!n.subscriptions[s].is_subscribable()) {
        errors.push_back(path + ".subscriptions[" + std::to_string(s) + "]: " +
                         n.subscriptions[s].str() + " is not a group or virtual address");
      }
    }
    if (n.peer && (*n.peer >= cfg.nodes.size() || *n.peer == i)) {
      errors.push_back(path + ".peer: must index another node of the roster");
    }
    if (auto err = scenario::validate(n.mobility)) errors.push_back(path + ".mobility: " + *err);
    if (n.role == "controller") ++controllers;
  }

  switch (cfg.traffic.pattern) {
    case TrafficPattern::ControllerToCohorts:
      if (controllers != 1) errors.push_back("nodes: exactly one controller is required");
      if (cfg.traffic.mode == transport::ExchangeMode::Group) {
        for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
          const NodeSpec& n = cfg.nodes[i];
          if (n.role == "server" && !cfg.cohort_groups.contains(n.cohort)) {
            errors.push_back("nodes[" + std::to_string(i) + "].cohort: group mode needs a " +
                             "cohort_groups entry for \"" + n.cohort + "\"");
          }
        }
      }
      break;
    case TrafficPattern::Pairs:
      for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
        if (cfg.nodes[i].role == "sender" && !cfg.nodes[i].peer) {
          errors.push_back("nodes[" + std::to_string(i) + "].peer: senders need a peer");
        }
      }
      break;
    case TrafficPattern::Flood:
      if (std::none_of(cfg.nodes.begin(), cfg.nodes.end(),
                       [](const NodeSpec& n) { return n.role == "source"; })) {
        errors.push_back("nodes: flood traffic needs a source");
      }
      break;
    case TrafficPattern::Coverage:
    case TrafficPattern::Formation:
      break;
  }
  return errors;
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["scenario"] = cfg.scenario;
  j["variant"] = cfg.variant;
  j["seed"] = cfg.seed;
  j["ttl"] = cfg.ttl;
  j["duration_us"] = cfg.effective_duration();
  j["mobility_tick_us"] = cfg.mobility_tick;
  j["rssi_period_us"] = cfg.rssi_period;

  const auto& p = cfg.propagation;
  j["propagation"] = {{"tx_power_dbm", p.tx_power_dbm},
                      {"pl0_db", p.pl0_db},
                      {"path_loss_exponent", p.path_loss_exponent},
                      {"floor_penalty_db", p.floor_penalty_db},
                      {"shadowing_sigma_db", p.shadowing_sigma_db},
                      {"sensitivity_dbm", p.sensitivity_dbm},
                      {"capture_margin_db", p.capture_margin_db ? json(*p.capture_margin_db) : json()},
                      {"background_loss_prob", p.background_loss_prob}};
  j["adv"] = {{"adv_interval_us", cfg.adv.adv_interval},
              {"adv_delay_max_us", cfg.adv.adv_delay_max},
              {"inter_channel_gap_us", cfg.adv.inter_channel_gap},
              {"n_events_source", cfg.adv.n_events_source},
              {"n_events_relay", cfg.adv.n_events_relay},
              {"queue_depth", cfg.adv.queue_depth}};
  j["scan"] = {{"scan_interval_us", cfg.scan.scan_interval},
               {"scan_window_us", cfg.scan.scan_window},
               {"mode", std::string(bearer::to_string(cfg.scan.mode))}};
  j["ext"] = {{"enabled", cfg.ext.enabled},
              {"aux_offset_us", cfg.ext.aux_offset},
              {"data_phy", std::string(radio::to_string(cfg.ext.data_phy))},
              {"ext_ind_bytes", cfg.ext.ext_ind_bytes}};
  j["transport"] = {{"segment_retry_us", cfg.transport.segment_retry},
                    {"max_block_retries", cfg.transport.max_block_retries},
                    {"ack_timer_us", cfg.transport.ack_timer},
                    {"reassembly_timeout_us", cfg.transport.reassembly_timeout}};
  j["exchange"] = {{"retry_initial_us", cfg.exchange.retry_initial},
                   {"retry_cap_us", cfg.exchange.retry_cap},
                   {"group_events", cfg.exchange.group_events},
                   {"status_events", cfg.exchange.status_events},
                   {"group_status_retries", cfg.exchange.group_status_retries},
                   {"status_size", cfg.exchange.status_size}};
  j["traffic"] = {{"pattern", std::string(to_string(cfg.traffic.pattern))},
                  {"mode", std::string(transport::to_string(cfg.traffic.mode))},
                  {"message_size", cfg.exchange.message_size},
                  {"iterations", cfg.traffic.iterations},
                  {"period_us", cfg.traffic.period},
                  {"start_us", cfg.traffic.start},
                  {"drain_us", cfg.traffic.drain},
                  {"group", cfg.traffic.group.str()},
                  {"max_outstanding", cfg.traffic.max_outstanding}};
  j["coverage"] = {{"rssi_threshold_dbm", cfg.coverage.rssi_threshold_dbm},
                   {"target_degree", cfg.coverage.target_degree},
                   {"beacon_period_us", cfg.coverage.beacon_period},
                   {"move_step_m", cfg.coverage.move_step_m}};
  j["election"] = {{"group", cfg.election.group.str()}, {"window_us", cfg.election.window}, {"rounds", cfg.election.rounds}};
  j["recruit"] = {{"group", cfg.recruit.group.str()},
                  {"formation_group", cfg.recruit.formation_group.str()},
                  {"k", cfg.recruit.k},
                  {"timeout_us", cfg.recruit.timeout}};
  json groups = json::object();
  for (const auto& [name, addr] : cfg.cohort_groups) groups[name] = addr.str();
  j["cohort_groups"] = groups;

  json nodes = json::array();
  for (const NodeSpec& n : cfg.nodes) {
    json subs = json::array();
    for (const auto& s : n.subscriptions) subs.push_back(s.str());
    json node{{"role", n.role},
              {"address", n.address.str()},
              {"position", {n.position.x, n.position.y, n.position.floor}},
              {"relay", n.relay},
              {"subscriptions", subs},
              {"cohort", n.cohort},
              {"mobility", mobility_json(n.mobility)}};
    if (n.peer) node["peer"] = *n.peer;
    if (cfg.traffic.pattern == TrafficPattern::Formation) {
      node["fitness"] = n.fitness;
      node["willing"] = n.willing;
    }
    nodes.push_back(std::move(node));
  }
  j["nodes"] = nodes;
  return j;
}

}  // namespace meshsim::harness
