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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "meshsim/sim/engine.hpp"

namespace meshsim::harness {

/// One (message, expected recipient) pair.
struct MessageRow {
  std::uint32_t msg_id = 0;
  std::string src;   // "0x0001"
  std::string dst;   // recipient unicast
  std::string mode;  // "unicast" | "group"
  sim::SimTime t_publish = 0;
  std::optional<sim::SimTime> t_deliver;
  std::optional<sim::Duration> rtt;
  bool delivered = false;  // counted toward PDR under the mode's definition
  std::uint32_t ttl_spent = 0;
  std::string cohort;  // not written to messages.csv; derived from the roster

  bool operator==(const MessageRow&) const = default;
};

struct DropRow {
  sim::NodeId node = 0;
  std::string reason;
  std::uint64_t count = 0;
};

struct RssiSample {
  sim::SimTime t = 0;
  sim::NodeId a = 0;
  sim::NodeId b = 0;
  double rssi_dbm = 0.0;
};

/// Order statistics over microsecond samples. Percentiles are nearest-rank;
/// the mean is kept as an exact sum and rounded to 0.01 ms for display.
struct Stats {
  std::size_t count = 0;
  std::int64_t sum_us = 0;
  std::int64_t min_us = 0;
  std::int64_t p25_us = 0;
  std::int64_t median_us = 0;
  std::int64_t p75_us = 0;
  std::int64_t p95_us = 0;
  std::int64_t max_us = 0;

  /// Mean in hundredths of a millisecond, rounded half up.
  [[nodiscard]] std::int64_t mean_centi_ms() const;
  [[nodiscard]] double mean_ms() const { return static_cast<double>(mean_centi_ms()) / 100.0; }
  [[nodiscard]] double ms(std::int64_t us) const { return static_cast<double>(us) / 1000.0; }
};

/// Nearest-rank value: the ceil(p * n / 100)-th smallest (1-based).
std::int64_t nearest_rank(const std::vector<std::int64_t>& sorted, unsigned percent);

/// Empty input yields nullopt (reported as "empty", never NaN).
std::optional<Stats> compute_stats(std::vector<std::int64_t> samples_us);

struct Aggregate {
  std::string cohort;  // "all" or a cohort name
  std::size_t expected = 0;
  std::size_t delivered = 0;
  std::optional<Stats> rtt;
  std::optional<Stats> latency;  // one-way, publish to first delivery

  [[nodiscard]] std::optional<double> pdr() const {
    if (expected == 0) return std::nullopt;
    return static_cast<double>(delivered) / static_cast<double>(expected);
  }
};

struct MetricsReport {
  std::string scenario;
  std::string variant;
  std::uint64_t seed = 0;
  std::string metric;  // primary latency metric: "rtt" or "latency"
  std::vector<MessageRow> rows;
  std::vector<DropRow> drops;
  std::vector<RssiSample> rssi;
  nlohmann::json manifest = nlohmann::json::object();
  /// Scenario-specific outcomes (coverage convergence, election, ...).
  nlohmann::json outcomes = nlohmann::json::object();
};

/// "all" first, then each cohort in name order.
std::vector<Aggregate> aggregate(const std::vector<MessageRow>& rows);

/// Mean RSSI over samples, or nullopt if there are none.
std::optional<double> mean_rssi(const std::vector<RssiSample>& samples);

/// Concatenates reports of the same scenario and metric (seed sweep).
MetricsReport merge_reports(const std::vector<MetricsReport>& reports);

}  // namespace meshsim::harness
