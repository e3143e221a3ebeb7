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

#include <cstdlib>
#include <sstream>

#include "desk.hpp"
#include "doctest.h"
#include "fairgsp/error.hpp"
#include "fairgsp/serialize.hpp"

using namespace fairgsp;

TEST_CASE("csv record splitting") {
  CHECK(split_csv_record("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv_record("\"a,b\",\"say \"\"hi\"\"\",") ==
        std::vector<std::string>{"a,b", "say \"hi\"", ""});
  CHECK(split_csv_record("x\r") == std::vector<std::string>{"x"});
}

TEST_CASE("reals round-trip through their text form") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.30000000000000004}) {
    CHECK(std::strtod(format_real(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("round log csv round trip") {
  auto inst = fairgsp::testing::desk_instance();
  auto d = fairgsp::testing::desk_distributions(inst);
  d.quality = {{{{1.0, 0.7}}, 0.5}, {{{0.3, 1.0}}, 0.5}};
  auto r = run_dynamic(inst, d, BetaFairGsp{Beta(2, 1)}, 60, 5, {.track_regret = false});
  std::ostringstream os;
  write_round_log_csv(os, inst, r.logs);
  const std::string text = os.str();
  CHECK(text.rfind(std::string(kRoundLogHeader) + "\r\n", 0) == 0);
  CHECK(text.find("\r\n1,1,H,") != std::string::npos);

  std::istringstream is(text);
  auto back = read_round_log_csv(is, inst);
  REQUIRE(back.size() == r.logs.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    const auto& a = r.logs[k];
    const auto& b = back[k];
    CHECK(a.t == b.t);
    CHECK(a.types.values == b.types.values);
    CHECK(a.bids.bids == b.bids.bids);
    CHECK(a.type_index == b.type_index);
    CHECK(a.bid_index == b.bid_index);
    CHECK(a.quality[GroupId::H] == b.quality[GroupId::H]);
    CHECK(a.quality[GroupId::L] == b.quality[GroupId::L]);
    CHECK(a.utilities == b.utilities);
    CHECK(a.result.fair_outcome.payments == b.result.fair_outcome.payments);
    CHECK(a.result.gsp_outcome.payments == b.result.gsp_outcome.payments);
    CHECK(a.result.compensation == b.result.compensation);
    CHECK(a.result.fair_outcome.assignment == b.result.fair_outcome.assignment);
    CHECK(a.result.gsp_outcome.assignment == b.result.gsp_outcome.assignment);
  }
}

TEST_CASE("malformed round logs are rejected") {
  auto inst = fairgsp::testing::desk_instance();
  auto parse = [&](const std::string& s) {
    std::istringstream is(s);
    return read_round_log_csv(is, inst);
  };
  const std::string h = std::string(kRoundLogHeader) + "\r\n";
  CHECK_THROWS_AS(parse(""), Error);
  CHECK_THROWS_AS(parse("t,bidder\r\n"), Error);
  CHECK_THROWS_AS(parse(h + "1,1,H,0.3,0.2,1,1,1,1,0,0,0\r\n"), Error);
  CHECK_THROWS_AS(parse(h + "1,1,H,0.35,0.2,1,1,1,1,0,0,0,0\r\n"), Error);
  CHECK_THROWS_AS(parse(h + "1,1,H,0.3,0.2,1,1,1,1,0,0,0,0\r\n"), Error);  // missing bidders
  try {
    parse(h + "1,1,H,abc,0.2,1,1,1,1,0,0,0,0\r\n");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
  }
}

TEST_CASE("metrics json") {
  auto inst = fairgsp::testing::desk_instance();
  auto d = fairgsp::testing::desk_distributions(inst);
  auto r = run_dynamic(inst, d, GspEfx{1.0}, 150, 5);
  auto j = to_json(r.metrics);
  CHECK(j["rounds"] == 150);
  CHECK(j["sw_equilibrium"]["total"].get<double>() == r.metrics.sw_equilibrium.total);
  CHECK(j["regret_curve"].size() == 2);
  CHECK(j["bcce_gap"].size() == 6);
  CHECK(j["max_relative_bcce_gap"].is_number());
  RunMetrics empty;
  auto e = to_json(empty);
  CHECK(e["poc"].is_null());
  CHECK(e["max_bcce_gap"].is_null());
}
