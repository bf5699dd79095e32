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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meshsim/harness/metrics.hpp"

namespace meshsim::harness {

/// Reports that cannot be compared, or an assertion that does not parse.
class CompareError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Comparison {
  struct Row {
    std::string cohort;
    std::string stat;  // pdr, mean, median, p25, p75, p95, min, max, rssi
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> ratio;  // a / b; 1.0 when both are zero
  };

  std::string label_a;
  std::string label_b;
  std::string metric;
  std::vector<Row> rows;

  /// Looks up one row; nullptr when absent.
  [[nodiscard]] const Row* find(const std::string& cohort, const std::string& stat) const;
  /// "<label> faster", or "equal", judged on the mean of cohort "all".
  [[nodiscard]] std::string verdict() const;
  [[nodiscard]] std::string table() const;
};

/// Paired aggregates of two runs. Throws CompareError when the runs use
/// different primary metrics.
Comparison compare_runs(const MetricsReport& a, const MetricsReport& b);

struct AssertionResult {
  std::string expr;
  bool holds = false;
  std::optional<double> lhs;
  std::optional<double> rhs;
  std::string detail;
};

/// Evaluates e.g. "a.mean < b.mean", "a[multi_hop].pdr >= 0.8",
/// "a.mean <= 0.6 * b.mean" or "a.latency.p95 > b.latency.p95".
/// References read side a or b, an optional [cohort] (default "all"), an
/// optional metric (rtt or latency; default the primary one) and a stat.
/// Times are in ms. A reference to an empty sample makes the assertion
/// fail rather than throw; malformed text throws CompareError.
AssertionResult evaluate_assertion(const std::string& expr, const MetricsReport& a,
                                   const MetricsReport& b);

}  // namespace meshsim::harness
