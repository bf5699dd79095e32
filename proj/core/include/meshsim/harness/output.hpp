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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "meshsim/harness/metrics.hpp"

namespace meshsim::harness {

inline constexpr const char* kMessagesHeader =
    "msg_id,src,dst,mode,t_publish_us,t_deliver_us,rtt_us,delivered,ttl_spent";
inline constexpr const char* kDropsHeader = "node,reason,count";
inline constexpr const char* kRssiHeader = "t_us,node_a,node_b,rssi_dbm";
inline constexpr const char* kCdfHeader = "latency_ms,cumulative_fraction";

inline constexpr const char* kMessagesFile = "messages.csv";
inline constexpr const char* kDropsFile = "drops.csv";
inline constexpr const char* kRssiFile = "rssi.csv";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kSummaryFile = "summary.txt";

/// Raised for any file that cannot be created, written or parsed; the
/// message always names the path.
class OutputError : public std::runtime_error {
 public:
  OutputError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string messages_csv(const MetricsReport& report);
std::string drops_csv(const MetricsReport& report);
std::string rssi_csv(const MetricsReport& report);

/// Primary-metric samples of one cohort ("all" for every row), in µs.
std::vector<std::int64_t> primary_samples(const MetricsReport& report, const std::string& cohort);

/// (latency_ms, cumulative_fraction) pairs, ascending; empty without samples.
std::vector<std::pair<double, double>> cdf_points(std::vector<std::int64_t> samples_us);
std::string cdf_csv(const MetricsReport& report, const std::string& cohort);

/// Human-readable aggregate block.
std::string summary_text(const MetricsReport& report);

/// Manifest plus outcomes and identity fields, as written to disk.
nlohmann::json manifest_document(const MetricsReport& report);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Writes messages/drops/rssi CSVs, the manifest and the summary into `dir`
/// (created if missing).
void write_report(const MetricsReport& report, const std::filesystem::path& dir);

/// Writes cdf_<cohort>.csv for "all" and each cohort; returns the paths.
std::vector<std::filesystem::path> write_cdfs(const MetricsReport& report,
                                              const std::filesystem::path& dir);

/// Reads a directory written by write_report. A directory holding seed_*
/// subdirectories instead is loaded as their merge, in seed order.
MetricsReport load_report(const std::filesystem::path& dir);

}  // namespace meshsim::harness
