// Copyright 2026 The fairgsp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <sstream>

#include "desk.hpp"
#include "doctest.h"
#include "fairgsp/error.hpp"
#include "fairgsp/serialize.hpp"
#include "fairgsp/simulation.hpp"
#include "oracles.hpp"

using namespace fairgsp;
using fairgsp::testing::desk_distributions;
using fairgsp::testing::desk_instance;
using fairgsp::testing::make_instance;

namespace {

std::string csv_of(const AuctionInstance& inst, const std::vector<RoundLog>& logs) {
  std::ostringstream os;
  write_round_log_csv(os, inst, logs);
  return os.str();
}

}  // namespace

TEST_CASE("distribution validation") {
  auto inst = desk_instance();
  auto d = desk_distributions(inst);
  CHECK(validate_distributions(inst, d).empty());
  d.value_probs[2] = {0.5, 0.5, 0.5};
  CHECK_FALSE(validate_distributions(inst, d).empty());
  d = desk_distributions(inst);
  d.value_probs.pop_back();
  CHECK_FALSE(validate_distributions(inst, d).empty());
  d = desk_distributions(inst);
  d.quality = {{{{1.0, 0.5}}, 0.5}, {{{0.5, 1.0}}, 0.4}};
  CHECK_FALSE(validate_distributions(inst, d).empty());
  CHECK_THROWS_AS(run_dynamic(inst, d, PlainGsp{}, 5, 1), Error);
}

TEST_CASE("single round with deterministic draws") {
  auto inst = make_instance({GroupId::H, GroupId::L}, {1.0, 0.5}, {1.0, 0.4}, 1.0, 1.0,
                            {0.0, 0.5, 1.0});
  inst.type_grid.assign(2, {1.0});
  Distributions d;
  d.value_probs.assign(2, {1.0});
  d.quality = {{{{0.8, 0.6}}, 1.0}};
  auto r = run_dynamic(inst, d, BetaFairGsp{Beta(1, 1)}, 1, 42);
  REQUIRE(r.logs.size() == 1);
  const RoundLog& log = r.logs[0];
  CHECK(log.t == 1);
  CHECK(log.quality[GroupId::H] == 0.8);
  CHECK(log.types.values == std::vector<double>{1.0, 1.0});
  RoundLog again = replay_round(inst, BetaFairGsp{Beta(1, 1)}, log);
  CHECK(again.utilities == log.utilities);
  AuctionInstance work = inst;
  work.quality = log.quality;
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(log.utilities[i] == utility(work, log.result.fair_outcome, log.types, i));
  }
}

TEST_CASE("fresh learners bid uniformly") {
  auto inst = make_instance({GroupId::H, GroupId::L}, {1.0, 0.5}, {1.0, 0.4}, 1.0, 1.0,
                            {0.0, 0.5, 1.0});
  Distributions d;
  d.value_probs.assign(2, {0.0, 0.0, 1.0});
  std::vector<int> counts(3, 0);
  for (std::uint64_t s = 0; s < 3000; ++s) {
    auto r = run_dynamic(inst, d, PlainGsp{}, 1, s);
    ++counts[r.logs[0].bid_index[0]];
  }
  for (int c : counts) CHECK(std::abs(c - 1000) < 120);
}

TEST_CASE("identical seeds give bit-identical logs") {
  auto inst = desk_instance();
  auto d = desk_distributions(inst);
  auto a = run_dynamic(inst, d, GspEfx{1.0}, 300, 7);
  auto b = run_dynamic(inst, d, GspEfx{1.0}, 300, 7);
  auto c = run_dynamic(inst, d, GspEfx{1.0}, 300, 8);
  CHECK(csv_of(inst, a.logs) == csv_of(inst, b.logs));
  CHECK(csv_of(inst, a.logs) != csv_of(inst, c.logs));
}

TEST_CASE("a one-point bid grid fixes welfare") {
  auto inst = desk_instance();
  inst.bid_grid.assign(6, {1.0});
  inst.type_grid.assign(6, {1.0});
  Distributions d;
  d.value_probs.assign(6, {1.0});
  auto r = run_dynamic(inst, d, PlainGsp{}, 50, 3);
  ValuationProfile v{std::vector<double>(6, 1.0)};
  Outcome fixed = allocate_gsp(inst, BidProfile{v.values});
  const double sw = social_welfare(inst, fixed, v).total;
  for (const auto& log : r.logs) {
    CHECK(social_welfare(inst, log.result.fair_outcome, log.types).total == sw);
  }
  CHECK(r.metrics.sw_equilibrium.total == doctest::Approx(sw));
}

TEST_CASE("dominant-strategy profile has no positive BCCE gap") {
  // Second slot is worthless, so GSP is a second-price auction where
  // truthful bidding is dominant.
  auto inst = make_instance({GroupId::H, GroupId::L}, {1.0, 0.0}, {1.0, 0.0}, 1.0, 1.0,
                            {0.0, 0.5, 1.0});
  inst.type_grid = {{0.5, 1.0}, {0.5, 1.0}};
  std::vector<RoundLog> logs;
  const std::vector<std::vector<std::size_t>> types{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  std::size_t t = 0;
  for (const auto& ti : types) {
    RoundLog log;
    log.t = ++t;
    log.type_index = ti;
    log.quality = {{1.0, 1.0}};
    for (std::size_t i = 0; i < 2; ++i) {
      log.types.values.push_back(inst.type_grid[i][ti[i]]);
      log.bids.bids.push_back(inst.type_grid[i][ti[i]]);
      log.bid_index.push_back(ti[i] + 1);
    }
    logs.push_back(replay_round(inst, PlainGsp{}, log));
  }
  for (const auto& row : bcce_gap(logs, inst, PlainGsp{})) {
    for (const auto& g : row) {
      REQUIRE(g.has_value());
      CHECK(*g <= 1e-12);
    }
  }
}

TEST_CASE("single-round gap is the best deviation gain") {
  auto inst = desk_instance();
  auto d = desk_distributions(inst);
  auto r = run_dynamic(inst, d, BetaFairGsp{Beta(2, 1)}, 1, 5);
  auto gaps = bcce_gap(r.logs, inst, BetaFairGsp{Beta(2, 1)});
  const RoundLog& log = r.logs[0];
  for (std::size_t i = 0; i < 6; ++i) {
    double best = 0.0;
    for (double b : inst.bid_grid[i]) {
      best = std::max(best, deviation_utility(inst, log.bids, log.types, BetaFairGsp{Beta(2, 1)}, i, b) -
                                log.utilities[i]);
    }
    for (std::size_t v = 0; v < 3; ++v) {
      if (v == log.type_index[i]) {
        REQUIRE(gaps[i][v].has_value());
        CHECK(*gaps[i][v] == doctest::Approx(best).epsilon(1e-12));
      } else {
        CHECK_FALSE(gaps[i][v].has_value());
      }
    }
  }
}

TEST_CASE("log-based gaps match the ledger and regret matches a log recomputation") {
  auto inst = desk_instance();
  auto d = desk_distributions(inst);
  d.quality = {{{{1.0, 0.7}}, 0.5}, {{{0.6, 1.0}}, 0.5}};
  const MechanismSpec scheme = GspEfx{1.0};
  auto r = run_dynamic(inst, d, scheme, 400, 17);
  auto gaps = bcce_gap(r.logs, inst, scheme);
  for (std::size_t i = 0; i < 6; ++i) {
    double realized_by_type[3] = {0, 0, 0};
    for (const auto& log : r.logs) realized_by_type[log.type_index[i]] += log.utilities[i];
    for (std::size_t v = 0; v < 3; ++v) {
      const auto visits = r.ledger.visits(i, v);
      REQUIRE(gaps[i][v].has_value() == (visits > 0));
      if (!visits) continue;
      CHECK(std::abs(*gaps[i][v] - r.ledger.type_regret(i, v) / visits) <= 1e-9);
      CHECK(std::abs(*gaps[i][v] - *r.metrics.bcce_gap[i][v]) <= 1e-9);
      CHECK(r.ledger.realized_sum(i, v) == doctest::Approx(realized_by_type[v]).epsilon(1e-12));
    }
  }
}

TEST_CASE("replay reproduces every logged round exactly") {
  auto inst = desk_instance();
  auto d = desk_distributions(inst);
  d.quality = {{{{1.0, 0.5}}, 0.3}, {{{0.9, 1.0}}, 0.7}};
  for (const MechanismSpec& s : {MechanismSpec{PlainGsp{}}, MechanismSpec{BetaFairGsp{Beta(3, 1)}},
                                 MechanismSpec{GspEfx{0.5}}}) {
    auto r = run_dynamic(inst, d, s, 300, 23, {.track_regret = false});
    for (const auto& log : r.logs) {
      RoundLog again = replay_round(inst, s, log);
      CHECK(again.utilities == log.utilities);
      CHECK(again.result.fair_outcome.payments == log.result.fair_outcome.payments);
      CHECK(again.result.fair_outcome.assignment == log.result.fair_outcome.assignment);
      CHECK(again.result.compensation == log.result.compensation);
    }
  }
}

TEST_CASE("type draws follow the product distribution") {
  auto inst = desk_instance();
  Distributions d = desk_distributions(inst);
  d.value_probs[0] = {0.6, 0.3, 0.1};
  d.value_probs[4] = {0.2, 0.2, 0.6};
  auto r = run_dynamic(inst, d, PlainGsp{}, 10000, 99, {.track_regret = false});
  const double critical = boost::math::quantile(boost::math::chi_squared(2.0), 0.99);
  for (std::size_t i = 0; i < 6; ++i) {
    auto counts = type_counts(r.logs, inst, i);
    double chi2 = 0.0;
    for (std::size_t v = 0; v < 3; ++v) {
      const double expected = 10000.0 * d.value_probs[i][v];
      chi2 += (counts[v] - expected) * (counts[v] - expected) / expected;
    }
    CHECK(chi2 < critical);
  }
}

TEST_CASE("joint type tables drive correlated draws") {
  auto inst = desk_instance();
  Distributions d = desk_distributions(inst);
  d.joint = JointTypeTable{{{0, 0, 0, 0, 0, 0}, {2, 2, 2, 2, 2, 2}}, {0.5, 0.5}};
  CHECK(validate_distributions(inst, d).empty());
  CHECK(d.type_probability(3, 2) == doctest::Approx(0.5));
  CHECK(d.type_probability(3, 1) == 0.0);
  auto r = run_dynamic(inst, d, PlainGsp{}, 200, 4, {.track_regret = false});
  for (const auto& log : r.logs) {
    for (std::size_t i = 1; i < 6; ++i) CHECK(log.type_index[i] == log.type_index[0]);
  }
}

TEST_CASE("metrics bookkeeping") {
  auto inst = desk_instance();
  auto d = desk_distributions(inst);
  auto r = run_dynamic(inst, d, BetaFairGsp{Beta(1, 1)}, 1200, 2);
  const auto& m = r.metrics;
  CHECK(m.rounds == 1200);
  REQUIRE(m.regret_curve.size() == 3);
  CHECK(m.regret_curve[0].t == 100);
  CHECK(m.regret_curve[1].t == 1000);
  CHECK(m.regret_curve[2].t == 1200);
  REQUIRE(m.budget_balance_series.size() == 3);
  CHECK(m.budget_balance_series.back().second == doctest::Approx(m.budget_balance));
  CHECK(m.budget_balance == doctest::Approx(m.compensation_mean / m.gsp_payments_mean));
  REQUIRE(m.poc.has_value());
  CHECK(*m.poc == doctest::Approx(m.sw_equilibrium.total / m.sw_truthful_gsp.total));
  CHECK(m.sw_equilibrium.total ==
        doctest::Approx(m.sw_equilibrium.by_group[GroupId::H] + m.sw_equilibrium.by_group[GroupId::L]));
  for (std::size_t i = 0; i < 6; ++i) CHECK(m.reward_scale[i] == doctest::Approx(3.0));
}

TEST_CASE("PoC is absent when truthful welfare vanishes") {
  RunMetrics m;
  CHECK_FALSE(poc_estimate(m).has_value());
  m.rounds = 10;
  m.sw_truthful_gsp.total = 2.0;
  m.sw_equilibrium.total = 1.0;
  CHECK(*poc_estimate(m) == doctest::Approx(0.5));
}

TEST_CASE("reward scales") {
  auto inst = desk_instance();
  auto d = desk_distributions(inst);
  d.quality = {{{{0.5, 1.0}}, 1.0}};
  auto plain = reward_scales(inst, d, PlainGsp{});
  auto fair = reward_scales(inst, d, BetaFairGsp{});
  CHECK(plain[0] == doctest::Approx(0.5));
  CHECK(plain[3] == doctest::Approx(1.0));
  CHECK(fair[0] == doctest::Approx(1.5));
  CHECK(fair[3] == doctest::Approx(3.0));
}
