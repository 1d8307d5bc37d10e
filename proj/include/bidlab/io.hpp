// Copyright 2026 The bidlab Authors
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

// Versioned CSV tables. Every file starts with a "# bidlab-<kind> v<N>"
// line followed by the column header; doubles are written in their shortest
// round-trip form so identical runs give identical bytes.

#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "bidlab/auction.hpp"
#include "bidlab/core.hpp"
#include "bidlab/harness.hpp"
#include "bidlab/hindsight.hpp"
#include "bidlab/pricing.hpp"

namespace bidlab {

inline constexpr int kCsvVersion = 1;

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("not a number: '" + std::string(s) + "'");
  }
  return x;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::string_view kind, std::span<const std::string_view> columns)
      : out_(&out), width_(columns.size()) {
    *out_ << "# bidlab-" << kind << " v" << kCsvVersion << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) *out_ << (i ? "," : "") << columns[i];
    *out_ << '\n';
  }

  void row(std::span<const std::string> fields) {
    if (fields.size() != width_) throw InvalidInput("CSV row has the wrong number of fields");
    for (std::size_t i = 0; i < fields.size(); ++i) *out_ << (i ? "," : "") << fields[i];
    *out_ << '\n';
  }
  void row(std::initializer_list<std::string> fields) {
    row(std::span<const std::string>(fields.begin(), fields.size()));
  }

 private:
  std::ostream* out_;
  std::size_t width_;
};

struct CsvTable {
  std::string kind;
  int version = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw InvalidInput("missing CSV column '" + std::string(name) + "'");
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Reads a table and checks its kind; any version other than the current
/// one is rejected.
inline CsvTable read_csv(std::istream& in, std::string_view expected_kind) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("empty CSV input");
  const std::string prefix = "# bidlab-";
  const auto space = line.rfind(" v");
  if (line.rfind(prefix, 0) != 0 || space == std::string::npos || space < prefix.size()) {
    throw InvalidInput("missing bidlab CSV version line");
  }
  t.kind = line.substr(prefix.size(), space - prefix.size());
  try {
    std::size_t used = 0;
    const std::string digits = line.substr(space + 2);
    t.version = std::stoi(digits, &used);
    if (used != digits.size()) throw InvalidInput("bad version");
  } catch (const std::exception&) {
    throw InvalidInput("malformed CSV version line: " + line);
  }
  if (t.kind != expected_kind) {
    throw InvalidInput("expected a " + std::string(expected_kind) + " table, got " + t.kind);
  }
  if (t.version != kCsvVersion) {
    throw InvalidInput("unsupported " + t.kind + " CSV version " + std::to_string(t.version));
  }
  if (!std::getline(in, line)) throw InvalidInput("CSV header missing");
  t.columns = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != t.columns.size()) throw InvalidInput("ragged CSV row: " + line);
    t.rows.push_back(std::move(fields));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Schemas

/// Per-period run table; utility is per period, roi_balance is cumulative.
inline void write_run_csv(std::ostream& out, const MarketModel& market, const BuyerParams& params,
                          const RunRecord& rec) {
  static constexpr std::string_view kCols[] = {"t",       "v",       "d",       "bid",
                                               "win",     "payment", "utility", "roi_balance"};
  CsvWriter w(out, "run", kCols);
  double balance = 0.0;
  for (std::size_t t = 0; t < rec.horizon(); ++t) {
    const std::size_t k = rec.types[t];
    const double v = market.value(k);
    const double d = market.cost(k);
    const bool win = rec.wins[t] != 0;
    const double utility = win ? v - params.alpha * d : 0.0;
    if (win) balance += v - params.gamma * d;
    w.row({std::to_string(t + 1), format_double(v), format_double(d), format_double(rec.bids[t]),
           win ? "1" : "0", format_double(win ? d : 0.0), format_double(utility),
           format_double(balance)});
  }
}

inline void write_revenue_csv(std::ostream& out, const std::vector<RevenuePoint>& curve) {
  static constexpr std::string_view kCols[] = {"price", "revenue", "class", "roi_slack",
                                               "budget_slack"};
  CsvWriter w(out, "revenue", kCols);
  for (const auto& p : curve) {
    w.row({format_double(p.price), format_double(p.revenue), to_string(p.cls),
           format_double(p.roi_slack), format_double(p.budget_slack)});
  }
}

inline void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  static constexpr std::string_view kCols[] = {"bidder", "regime", "median_norm_utility",
                                               "q25",    "q75",    "roi_attained_frac",
                                               "final_depletion"};
  CsvWriter w(out, "aggregate", kCols);
  for (const auto& r : rows) {
    w.row({r.bidder, to_string(r.regime), format_double(r.median_norm_utility),
           format_double(r.q25), format_double(r.q75), format_double(r.roi_attained_frac),
           format_double(r.final_depletion)});
  }
}

inline void write_pricing_csv(std::ostream& out, const PricingRun& run) {
  static constexpr std::string_view kCols[] = {"t", "price", "take", "phase"};
  CsvWriter w(out, "pricing", kCols);
  for (std::size_t t = 0; t < run.horizon(); ++t) {
    w.row({std::to_string(t + 1), format_double(run.prices[t]), run.takes[t] ? "1" : "0",
           run.phases[t] == PricingPhase::kExplore ? "explore" : "exploit"});
  }
}

inline void write_solution_csv(std::ostream& out, const MarketModel& market,
                               std::span<const double> weights, const HindsightSolution& sol) {
  static constexpr std::string_view kCols[] = {"k", "value", "cost", "ratio", "weight", "x"};
  CsvWriter w(out, "solution", kCols);
  for (std::size_t k = 0; k < market.size(); ++k) {
    w.row({std::to_string(k + 1), format_double(market.value(k)), format_double(market.cost(k)),
           format_double(market.ratio(k)), format_double(weights[k]),
           format_double(sol.solution[k])});
  }
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  static constexpr std::string_view kCols[] = {"T", "mean_regret", "std_error", "seeds", "slope"};
  CsvWriter w(out, "sweep", kCols);
  for (const auto& p : sweep.points) {
    w.row({std::to_string(p.horizon), format_double(p.mean_regret), format_double(p.std_error),
           std::to_string(p.seeds), format_double(sweep.slope)});
  }
}

}  // namespace bidlab
