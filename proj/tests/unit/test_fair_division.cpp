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

#include <algorithm>
#include <random>

#include "doctest.h"
#include "fairgsp/error.hpp"
#include "fairgsp/fair_division.hpp"
#include "fairgsp/gsp_auction.hpp"
#include "oracles.hpp"

using namespace fairgsp;
using fairgsp::testing::make_instance;
using fairgsp::testing::oracle_group_value;

namespace {

const std::vector<double> kCurve{1.0, 0.9, 0.5, 0.2};

AuctionInstance hhll() {
  return make_instance({GroupId::H, GroupId::H, GroupId::L, GroupId::L}, kCurve, kCurve);
}

// Phase 1 of group envy-cycle elimination, written against the brute-force
// group value.
GroupAllocation oracle_gece(const AuctionInstance& inst, const std::vector<double>& b,
                            double beta) {
  GroupAllocation a;
  a.slots_h = {0};
  a.slots_l = {1};
  auto val = [&](GroupId g, const std::vector<std::size_t>& s) {
    return oracle_group_value(inst, b, g, s);
  };
  for (std::size_t j = 2; j < b.size(); ++j) {
    if (val(GroupId::H, a.slots_h) < beta * val(GroupId::H, a.slots_l) &&
        val(GroupId::L, a.slots_l) < beta * val(GroupId::L, a.slots_h)) {
      std::swap(a.slots_h, a.slots_l);
    }
    if (val(GroupId::L, a.slots_l) >= beta * val(GroupId::L, a.slots_h)) {
      a.slots_h.push_back(j);
    } else {
      a.slots_l.push_back(j);
    }
  }
  std::sort(a.slots_h.begin(), a.slots_h.end());
  std::sort(a.slots_l.begin(), a.slots_l.end());
  return a;
}

}  // namespace

TEST_CASE("beta construction") {
  CHECK(Beta(2, 1).value() == doctest::Approx(0.5));
  CHECK_THROWS_AS(Beta(1, 2), Error);
  CHECK_THROWS_AS(Beta(0, 0), Error);
}

TEST_CASE("group value examples") {
  auto inst = hhll();
  BidProfile b{{1.0, 1.0, 1.0, 1.0}};
  CHECK(group_value(inst, b, GroupId::H, {1, 2}) == doctest::Approx(1.4));
  CHECK(group_value(inst, b, GroupId::H, {}) == 0.0);
  auto one = make_instance({GroupId::H, GroupId::L}, {1.0, 0.6}, {1.0, 0.6});
  CHECK(group_value(one, BidProfile{{1.0, 0.0}}, GroupId::H, {0, 1}) == doctest::Approx(1.0));
}

TEST_CASE("group value equals the best matching") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 300; ++rep) {
    auto rc = fairgsp::testing::random_case(rng, 2, 7, true);
    const std::size_t n = rc.bids.size();
    std::vector<std::size_t> slots;
    for (std::size_t j = 0; j < n; ++j) {
      if (rng() % 2) slots.push_back(j);
    }
    std::shuffle(slots.begin(), slots.end(), rng);
    for (GroupId g : kGroups) {
      CHECK(group_value(rc.inst, BidProfile{rc.bids}, g, slots) ==
            doctest::Approx(oracle_group_value(rc.inst, rc.bids, g, slots)).epsilon(1e-12));
    }
  }
}

TEST_CASE("group value is monotone in the slot set") {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 300; ++rep) {
    auto rc = fairgsp::testing::random_case(rng, 2, 10, false);
    BidProfile b{rc.bids};
    std::vector<std::size_t> slots;
    double prev = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (rng() % 3 == 0) continue;
      slots.push_back(j);
      for (GroupId g : kGroups) {
        double v = group_value(rc.inst, b, g, slots);
        if (g == GroupId::H) {
          CHECK(v + 1e-12 >= prev);
          prev = v;
        }
      }
    }
  }
}

TEST_CASE("round robin traces") {
  auto inst = hhll();
  BidProfile b{{1.0, 0.9, 0.8, 0.7}};
  Outcome gsp = allocate_gsp(inst, b);
  REQUIRE(gsp.assignment.bidder_at_slot() == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(round_robin_ef1(inst, gsp, Beta(1, 1)).bidder_at_slot() ==
        std::vector<std::size_t>{0, 2, 1, 3});
  CHECK(round_robin_ef1(inst, gsp, Beta(2, 1)).bidder_at_slot() ==
        std::vector<std::size_t>{0, 1, 2, 3});

  auto solo = make_instance({GroupId::H, GroupId::H, GroupId::H}, {1.0, 0.5, 0.2}, {1.0, 0.5, 0.2});
  Outcome g3 = allocate_gsp(solo, BidProfile{{0.3, 0.9, 0.6}});
  CHECK(round_robin_ef1(solo, g3, Beta(1, 1)) == g3.assignment);
}

TEST_CASE("round robin with equal blocks is EF1") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 1000; ++rep) {
    auto rc = fairgsp::testing::random_case(rng, 2, 12, rep % 2 == 0);
    BidProfile b{rc.bids};
    Outcome gsp = allocate_gsp(rc.inst, b);
    Assignment a = round_robin_ef1(rc.inst, gsp, Beta(1, 1));
    CHECK(verify_ef1(rc.inst, b, group_slots(rc.inst, a), 1.0));
  }
}

TEST_CASE("round robin can miss EF1 when xi_h exceeds xi_l") {
  // h takes slots {1,2} and l gets slot 3. Whichever slot l removes from
  // J_h, the remaining one is worth 0.5 to it against 0.05 for its own.
  auto inst = make_instance({GroupId::H, GroupId::H, GroupId::L}, {1.0, 0.5, 0.1},
                            {1.0, 1.0, 0.1});
  BidProfile b{{1.0, 1.0, 0.5}};
  Outcome gsp = allocate_gsp(inst, b);
  Assignment a = round_robin_ef1(inst, gsp, Beta(2, 1));
  GroupAllocation ga = group_slots(inst, a);
  CHECK(ga.slots_l == std::vector<std::size_t>{2});
  CHECK_FALSE(verify_ef1(inst, b, ga, 0.5));
}

TEST_CASE("round robin displacement bound for a GSP-majority prefix") {
  std::mt19937_64 rng(24);
  int tested = 0;
  for (int rep = 0; rep < 3000; ++rep) {
    auto rc = fairgsp::testing::random_case(rng, 2, 12, false);
    BidProfile b{rc.bids};
    Outcome gsp = allocate_gsp(rc.inst, b);
    const auto hs = rc.inst.members(GroupId::H);
    bool prefix = true;
    for (std::size_t j = 0; j < hs.size(); ++j) {
      if (rc.inst.group(gsp.assignment.bidder_at(j)) != GroupId::H) prefix = false;
    }
    if (!prefix) continue;
    ++tested;
    int xi_h = 1 + static_cast<int>(rng() % 4);
    Beta beta(xi_h, 1);
    Assignment a = round_robin_ef1(rc.inst, gsp, beta);
    for (std::size_t i : hs) {
      const double j = gsp.assignment.slot_of(i) + 1.0;
      const double bound = std::ceil((1.0 + beta.value()) * j) - 1.0;
      CHECK(a.slot_of(i) + 1.0 <= std::max(bound, 1.0));
    }
  }
  CHECK(tested > 50);
}

TEST_CASE("GECE trace on the four-bidder instance") {
  auto inst = hhll();
  BidProfile b{{1.0, 1.0, 1.0, 1.0}};
  Outcome gsp = allocate_gsp(inst, b);
  GeceResult r = gece_efx(inst, b, gsp, 1.0);
  CHECK(r.partition.slots_h == std::vector<std::size_t>{0, 3});
  CHECK(r.partition.slots_l == std::vector<std::size_t>{1, 2});
  CHECK(verify_efx(inst, b, r.partition, 1.0));
  CHECK(group_slots(inst, r.assignment).slots_h == r.partition.slots_h);
}

TEST_CASE("GECE with two bidders keeps the initialization") {
  auto inst = make_instance({GroupId::L, GroupId::H}, {1.0, 0.2}, {1.0, 0.9});
  BidProfile b{{1.0, 0.1}};
  GeceResult r = gece_efx(inst, b, allocate_gsp(inst, b), 0.5);
  CHECK(r.partition.slots_h == std::vector<std::size_t>{0});
  CHECK(r.partition.slots_l == std::vector<std::size_t>{1});
}

TEST_CASE("GECE preconditions") {
  auto inst = make_instance({GroupId::H, GroupId::H}, {1.0, 0.5}, {1.0, 0.5});
  BidProfile b{{1.0, 0.5}};
  CHECK_THROWS_AS(gece_efx(inst, b, allocate_gsp(inst, b), 1.0), Error);
}

TEST_CASE("GECE matches the recurrence oracle and is EFX") {
  std::mt19937_64 rng(25);
  for (int rep = 0; rep < 1500; ++rep) {
    auto rc = fairgsp::testing::random_case(rng, 2, 9, rep % 2 == 1);
    BidProfile b{rc.bids};
    Outcome gsp = allocate_gsp(rc.inst, b);
    const double beta = std::vector<double>{1.0, 0.5, 1.0 / 3.0}[rep % 3];
    GeceResult r = gece_efx(rc.inst, b, gsp, beta);
    GroupAllocation want = oracle_gece(rc.inst, rc.bids, beta);
    CHECK(r.partition.slots_h == want.slots_h);
    CHECK(r.partition.slots_l == want.slots_l);
    CHECK(verify_efx(rc.inst, b, r.partition, beta));
    if (verify_efx(rc.inst, b, r.partition, beta)) {
      CHECK(verify_ef1(rc.inst, b, r.partition, beta));
    }
  }
}

TEST_CASE("GECE phase 2 keeps GSP order and hands surplus slots over") {
  std::mt19937_64 rng(26);
  for (int rep = 0; rep < 500; ++rep) {
    auto rc = fairgsp::testing::random_case(rng, 2, 10, false);
    BidProfile b{rc.bids};
    Outcome gsp = allocate_gsp(rc.inst, b);
    GeceResult r = gece_efx(rc.inst, b, gsp, 1.0);
    for (GroupId g : kGroups) {
      auto order = gsp_order(rc.inst, gsp, g);
      std::vector<std::size_t> placed;
      for (std::size_t j = 0; j < b.size(); ++j) {
        std::size_t i = r.assignment.bidder_at(j);
        if (rc.inst.group(i) == g) placed.push_back(i);
      }
      CHECK(placed == order);
      if (order.size() >= r.partition.of(g).size()) {
        for (std::size_t j : r.partition.of(g)) CHECK(rc.inst.group(r.assignment.bidder_at(j)) == g);
      }
    }
  }
}

TEST_CASE("verify_ef1 examples") {
  auto inst = make_instance({GroupId::H, GroupId::L}, {1.0, 0.6}, {1.0, 0.6});
  BidProfile b{{1.0, 1.0}};
  CHECK(verify_ef1(inst, b, GroupAllocation{{1}, {0}}, 1.0));
  CHECK_FALSE(verify_ef1(inst, b, GroupAllocation{{}, {0, 1}}, 1.0));
  CHECK(verify_ef1(inst, b, GroupAllocation{{}, {0, 1}}, 0.0));
}

TEST_CASE("verify_efx examples") {
  auto inst = hhll();
  BidProfile b{{1.0, 1.0, 1.0, 1.0}};
  CHECK(verify_efx(inst, b, GroupAllocation{{0, 3}, {1, 2}}, 1.0));
  auto three = make_instance({GroupId::H, GroupId::L, GroupId::L}, {1.0, 0.9, 0.1}, {1.0, 0.9, 0.1});
  BidProfile b3{{1.0, 1.0, 1.0}};
  CHECK_FALSE(verify_efx(three, b3, GroupAllocation{{2}, {0, 1}}, 1.0));
  auto two = make_instance({GroupId::H, GroupId::L}, {1.0, 0.6}, {1.0, 0.6});
  CHECK(verify_efx(two, BidProfile{{1.0, 1.0}}, GroupAllocation{{0}, {1}}, 1.0));
}
