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

#include "meshsim/harness/compare.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace meshsim::harness {

namespace {

const std::vector<std::string> kTableStats{"pdr", "mean", "median", "p25", "p75",
                                           "p95", "min", "max"};

std::optional<double> stat_of(const std::optional<Stats>& s, const std::string& stat) {
  if (!s) return std::nullopt;
  auto ms = [](std::int64_t us) { return static_cast<double>(us) / 1000.0; };
  if (stat == "mean") return s->mean_ms();
  if (stat == "median") return ms(s->median_us);
  if (stat == "p25") return ms(s->p25_us);
  if (stat == "p75") return ms(s->p75_us);
  if (stat == "p95") return ms(s->p95_us);
  if (stat == "min") return ms(s->min_us);
  if (stat == "max") return ms(s->max_us);
  if (stat == "count") return static_cast<double>(s->count);
  throw CompareError("unknown stat '" + stat + "'");
}

const Aggregate* find_cohort(const std::vector<Aggregate>& aggs, const std::string& cohort) {
  for (const Aggregate& a : aggs) {
    if (a.cohort == cohort) return &a;
  }
  return nullptr;
}

std::optional<double> value_of(const MetricsReport& report, const std::vector<Aggregate>& aggs,
                               const std::string& cohort, const std::string& metric,
                               const std::string& stat) {
  if (stat == "rssi") return mean_rssi(report.rssi);
  const Aggregate* agg = find_cohort(aggs, cohort);
  if (!agg) return std::nullopt;
  if (stat == "pdr") return agg->pdr();
  if (stat == "expected") return static_cast<double>(agg->expected);
  if (stat == "delivered") return static_cast<double>(agg->delivered);
  if (metric == "rtt") return stat_of(agg->rtt, stat);
  if (metric == "latency") return stat_of(agg->latency, stat);
  throw CompareError("unknown metric '" + metric + "'");
}

std::string label_for(const MetricsReport& r, const char* fallback) {
  if (!r.variant.empty()) return r.variant;
  if (!r.scenario.empty()) return r.scenario;
  return fallback;
}

std::string num(const std::optional<double>& v, int digits) {
  if (!v) return "empty";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// --- assertion parsing ------------------------------------------------------

class Parser {
 public:
  Parser(const std::string& text, const MetricsReport& a, const MetricsReport& b)
      : text_(text), a_(a), b_(b), aggs_a_(aggregate(a.rows)), aggs_b_(aggregate(b.rows)) {}

  AssertionResult run() {
    AssertionResult r;
    r.expr = text_;
    std::string missing;
    r.lhs = product(missing);
    const std::string op = comparator();
    r.rhs = product(missing);
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + text_.substr(pos_) + "'");
    if (!r.lhs || !r.rhs) {
      r.holds = false;
      r.detail = "no samples for " + missing;
      return r;
    }
    const double l = *r.lhs;
    const double h = *r.rhs;
    if (op == "<") r.holds = l < h;
    if (op == "<=") r.holds = l <= h;
    if (op == ">") r.holds = l > h;
    if (op == ">=") r.holds = l >= h;
    if (op == "==") r.holds = l == h;
    if (op == "!=") r.holds = l != h;
    r.detail = num(l, 4) + " " + op + " " + num(h, 4);
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw CompareError("assertion '" + text_ + "': " + why);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string ident() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_' || text_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a name at offset " + std::to_string(start));
    return text_.substr(start, pos_ - start);
  }

  std::optional<double> product(std::string& missing) {
    std::optional<double> v = factor(missing);
    while (eat('*')) {
      std::optional<double> f = factor(missing);
      v = v && f ? std::optional<double>(*v * *f) : std::nullopt;
    }
    return v;
  }

  std::optional<double> factor(std::string& missing) {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(text_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number at offset " + std::to_string(pos_));
      }
      pos_ += used;
      return v;
    }
    const std::string side = ident();
    if (side != "a" && side != "b") fail("references start with a or b, got '" + side + "'");
    const MetricsReport& report = side == "a" ? a_ : b_;
    std::string cohort = "all";
    if (eat('[')) {
      cohort = ident();
      if (!eat(']')) fail("missing ']'");
    }
    if (!eat('.')) fail("expected '.' after " + side);
    std::string metric = report.metric;
    std::string stat = ident();
    if (stat == "rtt" || stat == "latency") {
      metric = stat;
      if (!eat('.')) fail("expected a stat after " + metric);
      stat = ident();
    }
    const auto& aggs = side == "a" ? aggs_a_ : aggs_b_;
    if (stat != "rssi" && !find_cohort(aggs, cohort)) {
      fail("side " + side + " has no cohort '" + cohort + "'");
    }
    std::optional<double> v = value_of(report, aggs, cohort, metric, stat);
    if (!v && missing.empty()) missing = side + "[" + cohort + "]." + metric + "." + stat;
    return v;
  }

  std::string comparator() {
    skip_space();
    for (const char* op : {"<=", ">=", "==", "!=", "<", ">"}) {
      const std::string s(op);
      if (text_.compare(pos_, s.size(), s) == 0) {
        pos_ += s.size();
        return s;
      }
    }
    fail("expected one of < <= > >= == !=");
  }

  std::string text_;
  const MetricsReport& a_;
  const MetricsReport& b_;
  std::vector<Aggregate> aggs_a_;
  std::vector<Aggregate> aggs_b_;
  std::size_t pos_ = 0;
};

}  // namespace

const Comparison::Row* Comparison::find(const std::string& cohort, const std::string& stat) const {
  for (const Row& r : rows) {
    if (r.cohort == cohort && r.stat == stat) return &r;
  }
  return nullptr;
}

std::string Comparison::verdict() const {
  const Row* mean = find("all", "mean");
  if (!mean || !mean->ratio) return "undecided";
  if (*mean->ratio < 1.0) return label_a + " faster";
  if (*mean->ratio > 1.0) return label_b + " faster";
  return "equal";
}

std::string Comparison::table() const {
  std::ostringstream out;
  out << "a = " << label_a << ", b = " << label_b << ", metric " << metric
      << " (ms), ratio = a / b\n";
  out << pad("cohort", 12) << pad("stat", 8) << pad("a", 12) << pad("b", 12) << "ratio\n";
  for (const Row& r : rows) {
    const int digits = r.stat == "pdr" ? 4 : (r.stat == "rssi" ? 2 : 3);
    out << pad(r.cohort, 12) << pad(r.stat, 8) << pad(num(r.a, digits), 12)
        << pad(num(r.b, digits), 12) << num(r.ratio, 3) << '\n';
  }
  out << "verdict: " << verdict() << '\n';
  return out.str();
}

Comparison compare_runs(const MetricsReport& a, const MetricsReport& b) {
  if (a.metric != b.metric) {
    throw CompareError("metric kinds differ: a reports " + a.metric + ", b reports " + b.metric);
  }
  Comparison c;
  c.label_a = label_for(a, "a");
  c.label_b = label_for(b, "b");
  if (c.label_a == c.label_b) {
    c.label_a += " (a)";
    c.label_b += " (b)";
  }
  c.metric = a.metric;
  const auto aggs_a = aggregate(a.rows);
  const auto aggs_b = aggregate(b.rows);
  std::vector<std::string> cohorts;
  std::set<std::string> seen;
  for (const auto* aggs : {&aggs_a, &aggs_b}) {
    for (const Aggregate& g : *aggs) {
      if (seen.insert(g.cohort).second) cohorts.push_back(g.cohort);
    }
  }
  auto ratio = [](const std::optional<double>& x,
                  const std::optional<double>& y) -> std::optional<double> {
    if (!x || !y) return std::nullopt;
    if (*y == 0.0) return *x == 0.0 ? std::optional<double>(1.0) : std::nullopt;
    return *x / *y;
  };
  for (const std::string& cohort : cohorts) {
    for (const std::string& stat : kTableStats) {
      Comparison::Row row{cohort, stat, value_of(a, aggs_a, cohort, c.metric, stat),
                          value_of(b, aggs_b, cohort, c.metric, stat), std::nullopt};
      row.ratio = ratio(row.a, row.b);
      c.rows.push_back(std::move(row));
    }
  }
  Comparison::Row rssi{"all", "rssi", mean_rssi(a.rssi), mean_rssi(b.rssi), std::nullopt};
  rssi.ratio = ratio(rssi.a, rssi.b);
  c.rows.push_back(std::move(rssi));
  return c;
}

AssertionResult evaluate_assertion(const std::string& expr, const MetricsReport& a,
                                   const MetricsReport& b) {
  return Parser(expr, a, b).run();
}

}  // namespace meshsim::harness
