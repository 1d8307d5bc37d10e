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

// bidlab solve | bid | price

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bidlab/bidlab.hpp"
#include "config.hpp"

namespace fs = std::filesystem;
using bidlab::cli::ConfigError;
using bidlab::cli::ConfigNode;

namespace {

constexpr const char* kOutEnv = "BIDLAB_OUT_DIR";

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

struct Context {
  std::uint64_t seed = 1;
  fs::path out;
  std::vector<std::string> written;

  std::ofstream open(const std::string& name) {
    fs::create_directories(out);
    const fs::path p = out / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    written.push_back(name);
    return f;
  }
};

/// --out, then the environment, then the config, then ./bidlab_out.
Context make_context(const GlobalOptions& g, ConfigNode& cfg) {
  Context ctx;
  ctx.seed = cfg.get<std::uint64_t>("seed", 1);
  if (g.seed) ctx.seed = *g.seed;
  const std::string from_config = cfg.get<std::string>("out_dir", "");
  if (g.out_dir) {
    ctx.out = *g.out_dir;
  } else if (const char* env = std::getenv(kOutEnv); env && *env) {
    ctx.out = env;
  } else if (!from_config.empty()) {
    ctx.out = from_config;
  } else {
    ctx.out = "bidlab_out";
  }
  return ctx;
}

/// Timestamps live only here so the data files stay byte-stable.
void write_meta(Context& ctx, const std::string& command, const GlobalOptions& g) {
  nlohmann::json meta;
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  meta["command"] = command;
  meta["config"] = g.config_path;
  meta["seed"] = ctx.seed;
  meta["written_at"] = buf;
  meta["files"] = ctx.written;
  fs::create_directories(ctx.out);
  std::ofstream f(ctx.out / "meta.json");
  f << meta.dump(2) << '\n';
}

std::vector<double> number_list(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError(key, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(key, "expected a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

bidlab::BuyerParams read_params(ConfigNode node) {
  bidlab::BuyerParams p;
  p.alpha = node.require<double>("alpha");
  p.gamma = node.require<double>("gamma");
  p.rho = node.require<double>("rho");
  node.finish();
  try {
    p.validate();
  } catch (const bidlab::InvalidInput& e) {
    throw ConfigError(node.qualify("gamma"), e.what());
  }
  return p;
}

bidlab::PricingModel read_pricing_model(ConfigNode node) {
  if (node.has("demo_gamma")) {
    const double gamma = node.require<double>("demo_gamma");
    node.finish();
    return bidlab::demo_pricing_model(gamma);
  }
  auto valuations = number_list(node.raw("valuations"), node.qualify("valuations"));
  auto probs = number_list(node.raw("probs"), node.qualify("probs"));
  auto prices = number_list(node.raw("prices"), node.qualify("prices"));
  const double gamma = node.require<double>("gamma");
  const double rho = node.require<double>("rho");
  node.finish();
  try {
    return bidlab::PricingModel(valuations, probs, prices, gamma, rho);
  } catch (const bidlab::InvalidInput& e) {
    throw ConfigError(node.qualify("valuations"), e.what());
  }
}

bidlab::MarketModel read_market(ConfigNode node) {
  const auto& pairs_json = node.raw("pairs");
  const std::string pairs_key = node.qualify("pairs");
  if (!pairs_json.is_array()) throw ConfigError(pairs_key, "expected a list of [value, cost]");
  std::vector<std::pair<double, double>> pairs;
  for (const auto& pr : pairs_json) {
    if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number() || !pr[1].is_number()) {
      throw ConfigError(pairs_key, "expected a list of [value, cost]");
    }
    pairs.emplace_back(pr[0].get<double>(), pr[1].get<double>());
  }
  auto probs = number_list(node.raw("probs"), node.qualify("probs"));
  node.finish();
  try {
    return bidlab::make_market(pairs, probs);
  } catch (const bidlab::InvalidInput& e) {
    throw ConfigError(pairs_key, e.what());
  }
}

void print_solution(const bidlab::HindsightSolution& s) {
  std::printf("r = %zu  q_roi = %s\n", s.roi_head, bidlab::format_double(s.q_roi).c_str());
  std::printf("b = %zu  q_budget = %s\n", s.budget_head,
              bidlab::format_double(s.q_budget).c_str());
  std::printf("kappa_alpha = %zu\n", s.kappa_alpha);
  std::printf("J = %zu  q = %s\n", s.head, bidlab::format_double(s.remainder).c_str());
  std::printf("objective = %s\n", bidlab::format_double(s.objective).c_str());
  std::printf("roi_slack = %s  budget_slack = %s\n", bidlab::format_double(s.roi_slack).c_str(),
              bidlab::format_double(s.budget_slack).c_str());
  for (const auto& w : s.warnings) std::printf("warning: %s\n", w.c_str());
}

// ---------------------------------------------------------------------------

int cmd_solve(const GlobalOptions& g, bool oracle) {
  const nlohmann::json j = bidlab::cli::load_json(g.config_path);
  ConfigNode cfg(j, "");
  Context ctx = make_context(g, cfg);

  if (cfg.has("pricing")) {
    const bidlab::PricingModel model = read_pricing_model(cfg.child("pricing"));
    cfg.finish();
    const auto curve = bidlab::revenue_curve(model);
    {
      auto f = ctx.open("revenue.csv");
      bidlab::write_revenue_csv(f, curve);
    }
    std::printf("%-8s %-10s %s\n", "price", "revenue", "class");
    for (const auto& p : curve) {
      std::printf("%-8s %-10s %s\n", bidlab::format_double(p.price).c_str(),
                  bidlab::format_double(p.revenue).c_str(), bidlab::to_string(p.cls));
    }
    if (oracle) {
      double worst = 0.0;
      for (double d : model.prices()) {
        const auto arrivals = model.arrivals_at(d);
        const auto closed = bidlab::u_of_d(model, d);
        const auto ref = bidlab::lp_vertex_oracle(model.probs(), 0.0, model.gamma(), model.rho(),
                                                  std::span<const bidlab::ArrivalType>(arrivals));
        worst = std::max(worst, std::abs(closed.objective - ref.objective));
      }
      std::printf("oracle max deviation = %s\n", bidlab::format_double(worst).c_str());
    }
  } else {
    const bidlab::MarketModel market = read_market(cfg.child("market"));
    const bidlab::BuyerParams params = read_params(cfg.child("params"));
    std::vector<double> weights = market.probs();
    if (cfg.has("weights")) {
      // Given in input order; make_market sorted the support, so map by pair.
      const auto raw = number_list(cfg.raw("weights"), "weights");
      const auto& in_pairs = j["market"]["pairs"];
      if (raw.size() != market.size()) throw ConfigError("weights", "length must match pairs");
      for (std::size_t i = 0; i < raw.size(); ++i) {
        const std::size_t k =
            market.find(in_pairs[i][0].get<double>(), in_pairs[i][1].get<double>());
        weights[k] = raw[i];
      }
    }
    const double cap = cfg.get<double>("cap", params.rho);
    cfg.finish();
    const auto sol = bidlab::solve_threshold(weights, params.alpha, params.gamma, cap, market);
    print_solution(sol);
    {
      auto f = ctx.open("solution.csv");
      bidlab::write_solution_csv(f, market, weights, sol);
    }
    if (oracle) {
      if (market.size() > 12) {
        std::printf("oracle skipped: more than 12 arrival types\n");
      } else {
        const auto ref =
            bidlab::lp_vertex_oracle(weights, params.alpha, params.gamma, cap, market);
        std::printf("oracle objective = %s\n", bidlab::format_double(ref.objective).c_str());
        std::printf("oracle max deviation = %s\n",
                    bidlab::format_double(std::abs(ref.objective - sol.objective)).c_str());
      }
    }
  }
  write_meta(ctx, "solve", g);
  return 0;
}

std::vector<bidlab::BidderSpec> read_roster(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError(key, "expected a nonempty list of bidders");
  std::vector<bidlab::BidderSpec> out;
  for (const auto& b : j) {
    if (!b.is_string()) throw ConfigError(key, "bidder names must be strings");
    const std::string name = b.get<std::string>();
    if (name == "all") {
      for (const auto& s : bidlab::standard_roster()) out.push_back(s);
      continue;
    }
    try {
      out.push_back(bidlab::parse_bidder(name));
    } catch (const bidlab::InvalidInput& e) {
      throw ConfigError(key, e.what());
    }
  }
  return out;
}

void apply_schedule(ConfigNode node, std::vector<bidlab::BidderSpec>& roster) {
  const std::string kind = node.get<std::string>("kind", "power");
  const double exponent = node.get<double>("exponent", 1.0);
  const double value = node.get<double>("value", 0.0);
  node.finish();
  bidlab::ScheduleChoice choice;
  if (kind == "power") {
    choice = bidlab::ScheduleChoice::kPower;
  } else if (kind == "theory") {
    choice = bidlab::ScheduleChoice::kTheory;
  } else if (kind == "constant") {
    choice = bidlab::ScheduleChoice::kConstant;
  } else {
    throw ConfigError(node.qualify("kind"), "expected power, theory or constant");
  }
  if (choice == bidlab::ScheduleChoice::kPower && !(exponent > 0.0)) {
    throw ConfigError(node.qualify("exponent"), "must be positive");
  }
  for (auto& b : roster) {
    b.schedule = choice;
    b.power_exponent = exponent;
    b.constant_ell = value;
  }
}

int cmd_bid(const GlobalOptions& g, bool sweep) {
  const nlohmann::json j = bidlab::cli::load_json(g.config_path);
  ConfigNode cfg(j, "");
  Context ctx = make_context(g, cfg);

  const std::string regime_name = cfg.get<std::string>("regime", "all");
  std::vector<bidlab::Regime> regimes;
  if (regime_name == "all") {
    regimes = {bidlab::Regime::kRoiDominant, bidlab::Regime::kBudgetDominant,
               bidlab::Regime::kAlphaDominant};
  } else {
    try {
      regimes = {bidlab::parse_regime(regime_name)};
    } catch (const bidlab::InvalidInput& e) {
      throw ConfigError("regime", e.what());
    }
  }
  std::vector<bidlab::BidderSpec> roster =
      cfg.has("bidders") ? read_roster(cfg.raw("bidders"), "bidders") : bidlab::standard_roster();
  if (cfg.has("schedule")) apply_schedule(cfg.child("schedule"), roster);
  const std::size_t horizon = cfg.get<std::size_t>("horizon", 10000);
  const std::size_t instances = cfg.get<std::size_t>("instances", 10);
  const bool write_runs = cfg.get<bool>("write_runs", true);
  std::optional<bidlab::BuyerParams> params_override;
  if (cfg.has("params")) params_override = read_params(cfg.child("params"));
  if (horizon < 1) throw ConfigError("horizon", "must be at least 1");

  std::vector<std::size_t> sweep_horizons{2500, 10000, 40000};
  std::size_t sweep_seeds = 20, sweep_instance = 0;
  std::string sweep_bidder = "ctbr_ee";
  if (cfg.has("sweep")) {
    ConfigNode s = cfg.child("sweep");
    if (s.has("horizons")) {
      sweep_horizons.clear();
      for (double h : number_list(s.raw("horizons"), s.qualify("horizons"))) {
        if (!(h >= 1.0)) throw ConfigError(s.qualify("horizons"), "horizons must be >= 1");
        sweep_horizons.push_back(static_cast<std::size_t>(h));
      }
    }
    sweep_seeds = s.get<std::size_t>("seeds", sweep_seeds);
    sweep_instance = s.get<std::size_t>("instance", sweep_instance);
    sweep_bidder = s.get<std::string>("bidder", sweep_bidder);
    s.finish();
  }
  cfg.finish();

  if (sweep) {
    const bidlab::Regime regime = regimes.front();
    const bidlab::BuyerParams params = params_override.value_or(bidlab::default_params(regime));
    bidlab::RandomSource inst_rng(
        ctx.seed,
        bidlab::purpose_stream(regime, sweep_instance, bidlab::StreamPurpose::kInstance));
    const auto market =
        bidlab::sample_regime_instance(regime, params, bidlab::grid_support(), inst_rng);
    bidlab::BidderSpec spec;
    try {
      spec = bidlab::parse_bidder(sweep_bidder);
    } catch (const bidlab::InvalidInput& e) {
      throw ConfigError("sweep.bidder", e.what());
    }
    if (cfg.has("schedule")) {
      std::vector<bidlab::BidderSpec> one{spec};
      apply_schedule(ConfigNode(j["schedule"], "schedule"), one);
      spec = one.front();
    }
    const auto result = bidlab::regret_scaling_sweep(market, params, spec, sweep_horizons,
                                                     sweep_seeds, ctx.seed);
    {
      auto f = ctx.open("sweep.csv");
      bidlab::write_sweep_csv(f, result);
    }
    std::printf("%-8s %-14s %s\n", "T", "mean_regret", "std_error");
    for (const auto& p : result.points) {
      std::printf("%-8zu %-14s %s\n", p.horizon, bidlab::format_double(p.mean_regret).c_str(),
                  bidlab::format_double(p.std_error).c_str());
    }
    std::printf("slope = %s\n", bidlab::format_double(result.slope).c_str());
    for (const auto& w : result.warnings) std::printf("warning: %s\n", w.c_str());
    write_meta(ctx, "bid --sweep", g);
    return 0;
  }

  std::vector<bidlab::AggregateRow> all_rows;
  for (const bidlab::Regime regime : regimes) {
    bidlab::ScenarioConfig sc = bidlab::ScenarioConfig::for_regime(regime);
    if (params_override) sc.params = *params_override;
    sc.horizon = horizon;
    sc.instances = instances;
    sc.bidders = roster;
    sc.seed = ctx.seed;
    const auto result = bidlab::run_benchmark_suite(sc, write_runs);
    if (write_runs) {
      for (const auto& inst : result.instances) {
        for (const auto& m : inst.runs) {
          auto f = ctx.open(std::string("run_") + bidlab::to_string(regime) + "_" +
                            std::to_string(inst.index) + "_" + m.bidder + ".csv");
          bidlab::write_run_csv(f, inst.market, sc.params, m.record);
        }
      }
    }
    all_rows.insert(all_rows.end(), result.aggregate.begin(), result.aggregate.end());
  }
  {
    auto f = ctx.open("aggregate.csv");
    bidlab::write_aggregate_csv(f, all_rows);
  }
  std::printf("%-8s %-20s %10s %8s %8s %8s %10s\n", "regime", "bidder", "median", "q25", "q75",
              "roi_ok", "depletion");
  for (const auto& r : all_rows) {
    std::printf("%-8s %-20s %10.4f %8.4f %8.4f %8.2f %10.4f\n", bidlab::to_string(r.regime),
                r.bidder.c_str(), r.median_norm_utility, r.q25, r.q75, r.roi_attained_frac,
                r.final_depletion);
  }
  write_meta(ctx, "bid", g);
  return 0;
}

int cmd_price(const GlobalOptions& g, bool bell_check) {
  const nlohmann::json j = bidlab::cli::load_json(g.config_path);
  ConfigNode cfg(j, "");
  Context ctx = make_context(g, cfg);

  const bidlab::PricingModel model =
      cfg.has("model") ? read_pricing_model(cfg.child("model")) : bidlab::demo_pricing_model(1.3);
  const std::string buyer = cfg.get<std::string>("buyer", "clairvoyant");
  const std::size_t horizon = cfg.get<std::size_t>("horizon", 50000);
  const std::size_t runs = cfg.get<std::size_t>("runs", 1);
  const double buyer_exponent = cfg.get<double>("buyer_schedule_exponent", 1.0);
  std::size_t episode = 0;
  if (cfg.has("episode_length")) {
    episode = cfg.require<std::size_t>("episode_length");
  } else {
    cfg.get<std::size_t>("episode_length", 0);
  }
  cfg.finish();
  if (buyer != "clairvoyant" && buyer != "ctbr") {
    throw ConfigError("buyer", "expected clairvoyant or ctbr");
  }
  if (runs < 1) throw ConfigError("runs", "must be at least 1");
  if (episode == 0) {
    try {
      episode = bidlab::default_episode_length(horizon);
    } catch (const bidlab::InvalidInput& e) {
      throw ConfigError("horizon", e.what());
    }
  }

  if (bell_check) {
    const auto report = bidlab::bell_shape_check(model);
    std::printf("%s", report.summary().c_str());
  }
  {
    auto f = ctx.open("revenue.csv");
    bidlab::write_revenue_csv(f, bidlab::revenue_curve(model));
  }

  const double best = bidlab::max_revenue(model);
  for (std::size_t r = 0; r < runs; ++r) {
    bidlab::RandomSource rng(ctx.seed, bidlab::stream_id({0x70726963ULL, r}));
    bidlab::PricingRun run;
    try {
      if (buyer == "clairvoyant") {
        bidlab::ClairvoyantBuyer b(model, std::move(rng));
        run = bidlab::binary_search_pricing(model, b, episode, horizon);
      } else {
        bidlab::CtbrPostedPriceBuyer b(model, bidlab::LearnerConfig::sgd_constant(horizon),
                                       buyer_exponent, std::move(rng));
        run = bidlab::binary_search_pricing(model, b, episode, horizon);
      }
    } catch (const bidlab::InvalidInput& e) {
      throw ConfigError("horizon", e.what());
    }
    {
      auto f = ctx.open(runs == 1 ? std::string("pricing.csv")
                                  : "pricing_" + std::to_string(r) + ".csv");
      bidlab::write_pricing_csv(f, run);
    }
    const double d_star = model.prices()[run.best_index - 1];
    std::printf("run %zu: m* = %zu  price = %s  pi = %s  max pi = %s\n", r, run.best_index,
                bidlab::format_double(d_star).c_str(),
                bidlab::format_double(bidlab::revenue_pi(model, d_star)).c_str(),
                bidlab::format_double(best).c_str());
    std::printf("  episodes = %zu  E = %zu  exploit mean revenue = %s  seller regret = %s\n",
                run.episodes.size(), episode,
                bidlab::format_double(run.exploit_mean_revenue()).c_str(),
                bidlab::format_double(bidlab::seller_regret(model, run)).c_str());
  }
  write_meta(ctx, "price", g);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bidlab: budget- and ROI-constrained bidding and pricing simulations"};
  app.require_subcommand(1);
  GlobalOptions g;
  bool oracle = false, bell = false, sweep = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", g.config_path, "JSON config file")->required();
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { g.seed = s; }, "RNG seed (overrides config)");
    sub->add_option_function<std::string>(
        "--out", [&](const std::string& s) { g.out_dir = s; },
        std::string("output directory (overrides ") + kOutEnv + " and config)");
  };
  CLI::App* solve = app.add_subcommand("solve", "solve the threshold program or a revenue curve");
  add_common(solve);
  solve->add_flag("--oracle", oracle, "cross-check against vertex enumeration");
  CLI::App* bid = app.add_subcommand("bid", "run bidding experiments");
  add_common(bid);
  bid->add_flag("--sweep", sweep, "regret scaling sweep instead of a suite");
  CLI::App* price = app.add_subcommand("price", "run binary-search pricing");
  add_common(price);
  price->add_flag("--bell-check", bell, "print the revenue-curve shape report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) return cmd_solve(g, oracle);
    if (*bid) return cmd_bid(g, sweep);
    if (*price) return cmd_price(g, bell);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const bidlab::InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
