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

#include "meshsim/harness/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace meshsim::harness {

std::int64_t Stats::mean_centi_ms() const {
  if (count == 0) return 0;
  // sum_us / count µs = sum_us / (10 * count) hundredths of a ms.
  const auto n = static_cast<std::int64_t>(count);
  return (sum_us * 2 + 10 * n) / (20 * n);
}

std::int64_t nearest_rank(const std::vector<std::int64_t>& sorted, unsigned percent) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank of an empty sample");
  const std::size_t n = sorted.size();
  std::size_t rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

std::optional<Stats> compute_stats(std::vector<std::int64_t> samples_us) {
  if (samples_us.empty()) return std::nullopt;
  std::sort(samples_us.begin(), samples_us.end());
  Stats s;
  s.count = samples_us.size();
  s.sum_us = std::accumulate(samples_us.begin(), samples_us.end(), std::int64_t{0});
  s.min_us = samples_us.front();
  s.max_us = samples_us.back();
  s.p25_us = nearest_rank(samples_us, 25);
  s.median_us = nearest_rank(samples_us, 50);
  s.p75_us = nearest_rank(samples_us, 75);
  s.p95_us = nearest_rank(samples_us, 95);
  return s;
}

std::vector<Aggregate> aggregate(const std::vector<MessageRow>& rows) {
  struct Acc {
    std::size_t expected = 0;
    std::size_t delivered = 0;
    std::vector<std::int64_t> rtt;
    std::vector<std::int64_t> latency;
  };
  std::map<std::string, Acc> by_cohort;
  Acc all;
  auto add = [](Acc& a, const MessageRow& r) {
    ++a.expected;
    if (r.delivered) ++a.delivered;
    if (r.rtt) a.rtt.push_back(static_cast<std::int64_t>(*r.rtt));
    if (r.t_deliver) a.latency.push_back(static_cast<std::int64_t>(*r.t_deliver - r.t_publish));
  };
  for (const MessageRow& r : rows) {
    add(all, r);
    if (!r.cohort.empty()) add(by_cohort[r.cohort], r);
  }
  auto finish = [](const std::string& name, Acc& a) {
    return Aggregate{name, a.expected, a.delivered, compute_stats(std::move(a.rtt)),
                     compute_stats(std::move(a.latency))};
  };
  std::vector<Aggregate> out{finish("all", all)};
  for (auto& [name, acc] : by_cohort) out.push_back(finish(name, acc));
  return out;
}

std::optional<double> mean_rssi(const std::vector<RssiSample>& samples) {
  if (samples.empty()) return std::nullopt;
  double sum = 0.0;
  for (const RssiSample& s : samples) sum += s.rssi_dbm;
  return sum / static_cast<double>(samples.size());
}

MetricsReport merge_reports(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("nothing to merge");
  MetricsReport out;
  out.scenario = reports.front().scenario;
  out.variant = reports.front().variant;
  out.metric = reports.front().metric;
  out.seed = reports.front().seed;
  nlohmann::json seeds = nlohmann::json::array();
  std::map<std::pair<sim::NodeId, std::string>, std::uint64_t> drops;
  for (const MetricsReport& r : reports) {
    if (r.scenario != out.scenario || r.metric != out.metric || r.variant != out.variant) {
      throw std::invalid_argument("cannot merge runs of different scenarios or metrics");
    }
    seeds.push_back(r.seed);
    out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
    out.rssi.insert(out.rssi.end(), r.rssi.begin(), r.rssi.end());
    for (const DropRow& d : r.drops) drops[{d.node, d.reason}] += d.count;
    if (!r.outcomes.empty()) out.outcomes[std::to_string(r.seed)] = r.outcomes;
  }
  for (const auto& [key, count] : drops) out.drops.push_back({key.first, key.second, count});
  out.manifest = reports.front().manifest;
  out.manifest["merged_seeds"] = seeds;
  return out;
}

}  // namespace meshsim::harness
