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

#include "meshsim/harness/output.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace meshsim::harness {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Microseconds as milliseconds with all three decimals, exact.
std::string us_as_ms(std::int64_t us) {
  const char* sign = us < 0 ? "-" : "";
  const std::int64_t a = us < 0 ? -us : us;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%lld.%03lld", sign, static_cast<long long>(a / 1000),
                static_cast<long long>(a % 1000));
  return buf;
}

std::string centi_ms(std::int64_t c) {
  const char* sign = c < 0 ? "-" : "";
  const std::int64_t a = c < 0 ? -c : c;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", sign, static_cast<long long>(a / 100),
                static_cast<long long>(a % 100));
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string stats_cells(const std::optional<Stats>& s) {
  if (!s) return "empty";
  std::string out;
  out += pad(centi_ms(s->mean_centi_ms()), 10);
  for (std::int64_t v : {s->median_us, s->p25_us, s->p75_us, s->p95_us, s->min_us, s->max_us}) {
    out += pad(us_as_ms(v), 10);
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_int(const std::string& text, const fs::path& path, std::size_t line_no) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw OutputError(path, "line " + std::to_string(line_no) + ": bad integer '" + text + "'");
  }
  return value;
}

double parse_double(const std::string& text, const fs::path& path, std::size_t line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw OutputError(path, "line " + std::to_string(line_no) + ": bad number '" + text + "'");
}

// Reads a CSV with the expected header; returns the data lines split.
std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header,
                                               std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw OutputError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw OutputError(path, "unexpected header, want '" + header + "'");
  }
  std::vector<std::vector<std::string>> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns) {
      throw OutputError(path, "line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(columns) + " fields");
    }
    out.push_back(std::move(cells));
  }
  return out;
}

MetricsReport load_single(const fs::path& dir) {
  MetricsReport report;
  const fs::path manifest_path = dir / kManifestFile;
  {
    std::ifstream in(manifest_path);
    if (!in) throw OutputError(manifest_path, "cannot open for reading");
    try {
      report.manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw OutputError(manifest_path, e.what());
    }
  }
  const nlohmann::json& m = report.manifest;
  report.scenario = m.value("scenario", "");
  report.variant = m.value("variant", "");
  report.seed = m.value("seed", std::uint64_t{0});
  report.metric = m.value("metric", "");
  if (m.contains("outcomes")) report.outcomes = m["outcomes"];

  std::map<std::string, std::string> cohort_of;
  if (m.contains("config") && m["config"].contains("nodes")) {
    for (const auto& n : m["config"]["nodes"]) {
      cohort_of[n.value("address", "")] = n.value("cohort", "");
    }
  }

  const fs::path mp = dir / kMessagesFile;
  std::size_t line_no = 1;
  for (const auto& c : read_csv(mp, kMessagesHeader, 9)) {
    ++line_no;
    MessageRow r;
    r.msg_id = parse_int<std::uint32_t>(c[0], mp, line_no);
    r.src = c[1];
    r.dst = c[2];
    r.mode = c[3];
    r.t_publish = parse_int<sim::SimTime>(c[4], mp, line_no);
    if (!c[5].empty()) r.t_deliver = parse_int<sim::SimTime>(c[5], mp, line_no);
    if (!c[6].empty()) r.rtt = parse_int<sim::Duration>(c[6], mp, line_no);
    r.delivered = parse_int<int>(c[7], mp, line_no) != 0;
    r.ttl_spent = parse_int<std::uint32_t>(c[8], mp, line_no);
    if (auto it = cohort_of.find(r.dst); it != cohort_of.end()) r.cohort = it->second;
    report.rows.push_back(std::move(r));
  }

  const fs::path dp = dir / kDropsFile;
  line_no = 1;
  for (const auto& c : read_csv(dp, kDropsHeader, 3)) {
    ++line_no;
    report.drops.push_back({parse_int<sim::NodeId>(c[0], dp, line_no), c[1],
                            parse_int<std::uint64_t>(c[2], dp, line_no)});
  }

  const fs::path rp = dir / kRssiFile;
  line_no = 1;
  for (const auto& c : read_csv(rp, kRssiHeader, 4)) {
    ++line_no;
    report.rssi.push_back({parse_int<sim::SimTime>(c[0], rp, line_no),
                           parse_int<sim::NodeId>(c[1], rp, line_no),
                           parse_int<sim::NodeId>(c[2], rp, line_no),
                           parse_double(c[3], rp, line_no)});
  }
  return report;
}

}  // namespace

std::string messages_csv(const MetricsReport& report) {
  std::string out = kMessagesHeader;
  out += '\n';
  for (const MessageRow& r : report.rows) {
    out += std::to_string(r.msg_id);
    out += ',' + r.src + ',' + r.dst + ',' + r.mode + ',' + std::to_string(r.t_publish) + ',';
    if (r.t_deliver) out += std::to_string(*r.t_deliver);
    out += ',';
    if (r.rtt) out += std::to_string(*r.rtt);
    out += ',';
    out += r.delivered ? '1' : '0';
    out += ',' + std::to_string(r.ttl_spent) + '\n';
  }
  return out;
}

std::string drops_csv(const MetricsReport& report) {
  std::string out = kDropsHeader;
  out += '\n';
  for (const DropRow& d : report.drops) {
    out += std::to_string(d.node) + ',' + d.reason + ',' + std::to_string(d.count) + '\n';
  }
  return out;
}

std::string rssi_csv(const MetricsReport& report) {
  std::string out = kRssiHeader;
  out += '\n';
  for (const RssiSample& s : report.rssi) {
    out += std::to_string(s.t) + ',' + std::to_string(s.a) + ',' + std::to_string(s.b) + ',' +
           fixed(s.rssi_dbm, 2) + '\n';
  }
  return out;
}

std::vector<std::int64_t> primary_samples(const MetricsReport& report, const std::string& cohort) {
  std::vector<std::int64_t> out;
  const bool rtt = report.metric == "rtt";
  for (const MessageRow& r : report.rows) {
    if (cohort != "all" && r.cohort != cohort) continue;
    if (rtt && r.rtt) out.push_back(*r.rtt);
    if (!rtt && r.t_deliver) out.push_back(*r.t_deliver - r.t_publish);
  }
  return out;
}

std::vector<std::pair<double, double>> cdf_points(std::vector<std::int64_t> samples_us) {
  std::sort(samples_us.begin(), samples_us.end());
  std::vector<std::pair<double, double>> out;
  const auto n = static_cast<double>(samples_us.size());
  for (std::size_t i = 0; i < samples_us.size(); ++i) {
    // Ties collapse onto their last occurrence so fractions stay a function.
    if (i + 1 < samples_us.size() && samples_us[i + 1] == samples_us[i]) continue;
    out.emplace_back(static_cast<double>(samples_us[i]) / 1000.0, static_cast<double>(i + 1) / n);
  }
  return out;
}

std::string cdf_csv(const MetricsReport& report, const std::string& cohort) {
  std::string out = kCdfHeader;
  out += '\n';
  for (const auto& [ms, frac] : cdf_points(primary_samples(report, cohort))) {
    out += fixed(ms, 3) + ',' + fixed(frac, 6) + '\n';
  }
  return out;
}

std::string summary_text(const MetricsReport& report) {
  std::ostringstream out;
  out << "scenario  " << report.scenario << '\n';
  if (!report.variant.empty()) out << "variant   " << report.variant << '\n';
  if (report.manifest.contains("merged_seeds")) {
    out << "seeds    ";
    for (const auto& s : report.manifest["merged_seeds"]) out << ' ' << s.get<std::uint64_t>();
    out << '\n';
  } else {
    out << "seed      " << report.seed << '\n';
  }
  out << "metric    " << report.metric << (report.metric == "rtt" ? " (round trip)" : " (one way)")
      << '\n';
  out << "times in ms; percentiles nearest-rank\n\n";

  const auto aggs = aggregate(report.rows);
  auto table = [&](const std::string& title, bool use_rtt) {
    out << title << '\n';
    out << pad("cohort", 12) << pad("expected", 10) << pad("delivered", 11) << pad("pdr", 8)
        << pad("mean", 10) << pad("median", 10) << pad("p25", 10) << pad("p75", 10)
        << pad("p95", 10) << pad("min", 10) << "max\n";
    for (const Aggregate& a : aggs) {
      out << pad(a.cohort, 12) << pad(std::to_string(a.expected), 10)
          << pad(std::to_string(a.delivered), 11)
          << pad(a.pdr() ? fixed(*a.pdr(), 4) : std::string("empty"), 8)
          << stats_cells(use_rtt ? a.rtt : a.latency) << '\n';
    }
  };
  const bool rtt = report.metric == "rtt";
  table(rtt ? "round-trip time" : "one-way latency", rtt);
  if (rtt) {
    out << '\n';
    table("one-way latency (command)", false);
  }

  out << '\n';
  if (auto m = mean_rssi(report.rssi)) {
    out << "mean rssi " << fixed(*m, 2) << " dBm over " << report.rssi.size() << " samples\n";
  } else {
    out << "mean rssi empty\n";
  }
  std::map<std::string, std::uint64_t> by_reason;
  for (const DropRow& d : report.drops) by_reason[d.reason] += d.count;
  out << "drops";
  if (by_reason.empty()) out << " none";
  out << '\n';
  for (const auto& [reason, count] : by_reason) out << "  " << pad(reason, 22) << count << '\n';
  if (!report.outcomes.empty()) out << "outcomes  " << report.outcomes.dump() << '\n';
  return out.str();
}

nlohmann::json manifest_document(const MetricsReport& report) {
  nlohmann::json doc = report.manifest;
  doc["scenario"] = report.scenario;
  doc["variant"] = report.variant;
  doc["seed"] = report.seed;
  doc["metric"] = report.metric;
  doc["outcomes"] = report.outcomes;
  doc["files"] = {kMessagesFile, kDropsFile, kRssiFile, kSummaryFile};
  return doc;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError(path, "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw OutputError(path, "write failed");
}

void write_report(const MetricsReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw OutputError(dir, "cannot create directory");
  write_text(dir / kMessagesFile, messages_csv(report));
  write_text(dir / kDropsFile, drops_csv(report));
  write_text(dir / kRssiFile, rssi_csv(report));
  write_text(dir / kManifestFile, manifest_document(report).dump(2) + '\n');
  write_text(dir / kSummaryFile, summary_text(report));
}

std::vector<fs::path> write_cdfs(const MetricsReport& report, const fs::path& dir) {
  std::vector<fs::path> paths;
  for (const Aggregate& a : aggregate(report.rows)) {
    fs::path p = dir / ("cdf_" + a.cohort + ".csv");
    write_text(p, cdf_csv(report, a.cohort));
    paths.push_back(std::move(p));
  }
  if (paths.empty()) {
    fs::path p = dir / "cdf_all.csv";
    write_text(p, cdf_csv(report, "all"));
    paths.push_back(std::move(p));
  }
  return paths;
}

MetricsReport load_report(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw OutputError(dir, "not a directory");
  if (fs::exists(dir / kMessagesFile)) return load_single(dir);
  std::vector<std::pair<std::uint64_t, fs::path>> seeds;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_directory() || name.rfind("seed_", 0) != 0) continue;
    std::uint64_t n = 0;
    const std::string digits = name.substr(5);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) continue;
    seeds.emplace_back(n, entry.path());
  }
  if (seeds.empty()) throw OutputError(dir, "no messages.csv and no seed_* runs");
  std::sort(seeds.begin(), seeds.end());
  std::vector<MetricsReport> reports;
  for (const auto& [n, path] : seeds) reports.push_back(load_single(path));
  try {
    return merge_reports(reports);
  } catch (const std::invalid_argument& e) {
    throw OutputError(dir, e.what());
  }
}

}  // namespace meshsim::harness
