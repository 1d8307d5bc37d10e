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

#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "bidlab/io.hpp"

namespace bidlab {
namespace {

TEST(Format, ShortestRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5, 0.0, 123456789.125}) {
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_TRUE(std::isnan(parse_double(format_double(NAN))));
  EXPECT_THROW(parse_double("0.1x"), InvalidInput);
}

TEST(Csv, RevenueRoundTrip) {
  const auto model = demo_pricing_model(1.3);
  const auto curve = revenue_curve(model);
  std::stringstream ss;
  write_revenue_csv(ss, curve);
  const auto t = read_csv(ss, "revenue");
  EXPECT_EQ(t.version, 1);
  EXPECT_EQ(t.columns,
            (std::vector<std::string>{"price", "revenue", "class", "roi_slack", "budget_slack"}));
  ASSERT_EQ(t.rows.size(), 21u);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    EXPECT_EQ(parse_double(t.rows[i][t.column("price")]), curve[i].price);
    EXPECT_EQ(parse_double(t.rows[i][t.column("revenue")]), curve[i].revenue);
    EXPECT_EQ(t.rows[i][t.column("class")], to_string(curve[i].cls));
  }
}

TEST(Csv, RunTableIsByteStable) {
  const auto params = default_params(Regime::kAlphaDominant);
  RandomSource inst(1, 0);
  const auto m = sample_regime_instance(Regime::kAlphaDominant, params, grid_support(), inst);
  auto render = [&] {
    RandomSource rng(2, 0);
    const auto metrics = run_bidder_trial(m, params, parse_bidder("ctbr_ee"), 500, rng);
    std::stringstream ss;
    write_run_csv(ss, m, params, metrics.record);
    return ss.str();
  };
  const std::string a = render();
  EXPECT_EQ(a, render());
  std::stringstream in(a);
  const auto t = read_csv(in, "run");
  EXPECT_EQ(t.rows.size(), 500u);
  EXPECT_EQ(t.columns.size(), 8u);
}

TEST(Csv, RejectsOtherVersionsAndKinds) {
  std::stringstream v2("# bidlab-run v2\nt,v\n1,2\n");
  EXPECT_THROW(read_csv(v2, "run"), InvalidInput);
  std::stringstream kind("# bidlab-sweep v1\nT\n1\n");
  EXPECT_THROW(read_csv(kind, "run"), InvalidInput);
  std::stringstream none("t,v\n1,2\n");
  EXPECT_THROW(read_csv(none, "run"), InvalidInput);
  std::stringstream ragged("# bidlab-run v1\nt,v\n1\n");
  EXPECT_THROW(read_csv(ragged, "run"), InvalidInput);
}

TEST(Csv, WriterChecksRowWidth) {
  std::stringstream ss;
  static constexpr std::string_view kCols[] = {"a", "b"};
  CsvWriter w(ss, "x", kCols);
  EXPECT_THROW(w.row({std::string("1")}), InvalidInput);
}

}  // namespace
}  // namespace bidlab
