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

// sim: command line front end for meshsim.
//
//   sim run     --config <file> --seed <n> --out <dir>
//   sim sweep   --config <file> --seeds <a..b> --out <dir>
//   sim report  --in <dir>
//   sim compare --a <dir> --b <dir> --assert <expr>
//
// Exit status: 0 on success with every assertion holding, 1 when an
// assertion fails, 2 on bad input or I/O errors.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "meshsim/harness/compare.hpp"
#include "meshsim/harness/config.hpp"
#include "meshsim/harness/output.hpp"
#include "meshsim/harness/run.hpp"
#include "meshsim/scenario/topology.hpp"

namespace fs = std::filesystem;
using namespace meshsim::harness;

namespace {

constexpr int kExitAssertion = 1;
constexpr int kExitError = 2;

struct Source {
  std::string config_path;
  std::string scenario;
  std::string variant;
};

void add_source_options(CLI::App* cmd, Source& src) {
  auto* cfg = cmd->add_option("--config", src.config_path, "Scenario config (JSON)");
  auto* key = cmd->add_option("--scenario", src.scenario, "Library scenario key, instead of --config");
  cfg->excludes(key);
  key->excludes(cfg);
  cmd->add_option("--variant", src.variant, "Scenario variant (overrides the config)");
}

nlohmann::json load_document(const Source& src) {
  nlohmann::json doc;
  if (!src.config_path.empty()) {
    std::ifstream in(src.config_path);
    if (!in) throw OutputError(src.config_path, "cannot open for reading");
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw OutputError(src.config_path, e.what());
    }
  } else if (!src.scenario.empty()) {
    doc = {{"scenario", src.scenario}};
  } else {
    throw std::invalid_argument("one of --config or --scenario is required");
  }
  if (!src.variant.empty()) doc["variant"] = src.variant;
  return doc;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  auto number = [&](std::string_view part) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw std::invalid_argument("--seeds: expected a..b, got '" + text + "'");
    }
    return v;
  };
  const std::string_view view(text);
  if (dots == std::string::npos) {
    const auto v = number(view);
    return {v, v};
  }
  const auto lo = number(view.substr(0, dots));
  const auto hi = number(view.substr(dots + 2));
  if (hi < lo) throw std::invalid_argument("--seeds: empty range '" + text + "'");
  return {lo, hi};
}

MetricsReport run_one(const nlohmann::json& doc, std::optional<std::uint64_t> seed) {
  return run_scenario(load_config(doc, seed));
}

int cmd_run(const Source& src, std::optional<std::uint64_t> seed, const std::string& out) {
  const MetricsReport report = run_one(load_document(src), seed);
  write_report(report, out);
  std::cout << summary_text(report);
  std::cout << "wrote " << (fs::path(out) / kMessagesFile).string() << '\n';
  return 0;
}

int cmd_sweep(const Source& src, const std::string& seeds, const std::string& out, unsigned jobs) {
  const auto [lo, hi] = parse_seed_range(seeds);
  const nlohmann::json doc = load_document(src);
  // Seeds are independent instances; run them in bounded parallel batches.
  std::vector<MetricsReport> reports;
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  for (std::uint64_t start = lo; start <= hi;) {
    std::vector<std::future<MetricsReport>> batch;
    std::uint64_t s = start;
    for (; s <= hi && batch.size() < jobs; ++s) {
      batch.push_back(std::async(std::launch::async, run_one, std::cref(doc), s));
    }
    for (auto& f : batch) reports.push_back(f.get());
    if (s > hi) break;
    start = s;
  }
  for (const MetricsReport& r : reports) {
    write_report(r, fs::path(out) / ("seed_" + std::to_string(r.seed)));
  }
  const MetricsReport merged = merge_reports(reports);
  const std::string text = summary_text(merged);
  write_text(fs::path(out) / kSummaryFile, text);
  std::cout << text;
  return 0;
}

int cmd_report(const std::string& in) {
  const MetricsReport report = load_report(in);
  std::cout << summary_text(report);
  for (const fs::path& p : write_cdfs(report, in)) std::cout << "wrote " << p.string() << '\n';
  return 0;
}

int cmd_compare(const std::string& a_dir, const std::string& b_dir,
                const std::vector<std::string>& assertions) {
  const MetricsReport a = load_report(a_dir);
  const MetricsReport b = load_report(b_dir);
  const Comparison c = compare_runs(a, b);
  std::cout << c.table();
  bool all = true;
  for (const std::string& expr : assertions) {
    const AssertionResult r = evaluate_assertion(expr, a, b);
    all = all && r.holds;
    std::cout << (r.holds ? "PASS " : "FAIL ") << expr << "  (" << r.detail << ")\n";
  }
  return all ? 0 : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meshsim: discrete-event simulator for managed-flooding mesh networks"};
  app.require_subcommand(1);

  Source run_src;
  std::optional<std::uint64_t> run_seed;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run one scenario and write its outputs");
  add_source_options(run, run_src);
  run->add_option("--seed", run_seed, "Master seed (overrides the config)");
  run->add_option("--out", run_out, "Output directory")->required();

  Source sweep_src;
  std::string sweep_seeds;
  std::string sweep_out;
  unsigned sweep_jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a seed range; one seed_<n>/ directory per seed");
  add_source_options(sweep, sweep_src);
  sweep->add_option("--seeds", sweep_seeds, "Inclusive seed range a..b")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  sweep->add_option("--jobs", sweep_jobs, "Parallel runs (0: one per core)");

  std::string report_in;
  auto* report = app.add_subcommand("report", "Summarize a run or sweep and write CDF files");
  report->add_option("--in", report_in, "Run or sweep directory")->required();

  std::string cmp_a;
  std::string cmp_b;
  std::vector<std::string> cmp_asserts;
  auto* compare = app.add_subcommand("compare", "Paired aggregates of two runs");
  compare->add_option("--a", cmp_a, "First run or sweep directory")->required();
  compare->add_option("--b", cmp_b, "Second run or sweep directory")->required();
  compare->add_option("--assert", cmp_asserts, "Assertion such as 'a.mean < b.mean' (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*run) return cmd_run(run_src, run_seed, run_out);
    if (*sweep) return cmd_sweep(sweep_src, sweep_seeds, sweep_out, sweep_jobs);
    if (*report) return cmd_report(report_in);
    if (*compare) return cmd_compare(cmp_a, cmp_b, cmp_asserts);
  } catch (const ConfigError& e) {
    std::cerr << "config error:\n";
    for (const std::string& msg : e.errors()) std::cerr << "  " << msg << '\n';
    return kExitError;
  } catch (const meshsim::scenario::CalibrationFault& e) {
    std::cerr << "calibration failed: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
