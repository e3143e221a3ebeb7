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

#include "fairgsp/fair_division.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "fairgsp/error.hpp"

namespace fairgsp {

Beta::Beta(int xi_h, int xi_l) : xi_h_(xi_h), xi_l_(xi_l) {
  if (xi_l < 1 || xi_h < xi_l) {
    throw Error(ErrorCode::kInvalidArgument,
                "beta requires xi_h >= xi_l >= 1, got xi_h=" + std::to_string(xi_h) +
                    " xi_l=" + std::to_string(xi_l));
  }
}

GroupAllocation group_slots(const AuctionInstance& inst, const Assignment& asg) {
  GroupAllocation alloc;
  for (std::size_t j = 0; j < asg.size(); ++j) {
    alloc.of(inst.group(asg.bidder_at(j))).push_back(j);
  }
  return alloc;
}

double group_value(const AuctionInstance& inst, const BidProfile& bids, GroupId g,
                   const std::vector<std::size_t>& slots) {
  std::vector<double> rates;
  rates.reserve(slots.size());
  for (std::size_t j : slots) rates.push_back(inst.alpha(j, g));
  std::sort(rates.begin(), rates.end(), std::greater<>());

  std::vector<double> group_bids;
  for (std::size_t i : inst.members(g)) group_bids.push_back(bids[i]);
  std::sort(group_bids.begin(), group_bids.end(), std::greater<>());

  double sum = 0.0;
  const std::size_t k = std::min(rates.size(), group_bids.size());
  for (std::size_t r = 0; r < k; ++r) sum += rates[r] * group_bids[r];
  return inst.gamma(g) * sum;
}

std::vector<std::size_t> gsp_order(const AuctionInstance& inst, const Outcome& gsp_out,
                                   GroupId g) {
  std::vector<std::size_t> out;
  for (std::size_t i : gsp_out.assignment.bidder_at_slot()) {
    if (inst.group(i) == g) out.push_back(i);
  }
  return out;
}

Assignment round_robin_ef1(const AuctionInstance& inst, const Outcome& gsp_out,
                           const Beta& beta) {
  const std::size_t n = inst.n_bidders();
  const auto h = gsp_order(inst, gsp_out, GroupId::H);
  const auto l = gsp_order(inst, gsp_out, GroupId::L);
  const auto xi_h = static_cast<std::size_t>(beta.xi_h());
  const auto xi_l = static_cast<std::size_t>(beta.xi_l());

  std::vector<std::size_t> seat;
  seat.reserve(n);
  std::size_t ih = 0;
  std::size_t il = 0;
  while (ih < h.size() && il < l.size()) {
    for (std::size_t k = 0; seat.size() < n && k < xi_h && ih < h.size(); ++k) {
      seat.push_back(h[ih++]);
    }
    for (std::size_t k = 0; seat.size() < n && k < xi_l && il < l.size(); ++k) {
      seat.push_back(l[il++]);
    }
  }
  while (seat.size() < n && ih < h.size()) seat.push_back(h[ih++]);
  while (seat.size() < n && il < l.size()) seat.push_back(l[il++]);
  return Assignment(std::move(seat));
}

GeceResult gece_efx(const AuctionInstance& inst, const BidProfile& bids,
                    const Outcome& gsp_out, double beta) {
  const std::size_t n = inst.n_bidders();
  const auto h = gsp_order(inst, gsp_out, GroupId::H);
  const auto l = gsp_order(inst, gsp_out, GroupId::L);
  if (n < 2 || h.empty() || l.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "envy-cycle elimination needs n >= 2 and both groups nonempty");
  }

  GroupAllocation part;
  part.slots_h = {0};
  part.slots_l = {1};
  auto value = [&](GroupId g, const std::vector<std::size_t>& s) {
    return group_value(inst, bids, g, s);
  };
  for (std::size_t j = 2; j < n; ++j) {
    bool h_envies = value(GroupId::H, part.slots_h) < beta * value(GroupId::H, part.slots_l);
    bool l_envies = value(GroupId::L, part.slots_l) < beta * value(GroupId::L, part.slots_h);
    if (h_envies && l_envies) std::swap(part.slots_h, part.slots_l);
    if (value(GroupId::L, part.slots_l) >= beta * value(GroupId::L, part.slots_h)) {
      part.slots_h.push_back(j);
    } else {
      part.slots_l.push_back(j);
    }
  }
  std::sort(part.slots_h.begin(), part.slots_h.end());
  std::sort(part.slots_l.begin(), part.slots_l.end());

  std::vector<std::size_t> seat(n);
  std::size_t ih = 0;
  std::size_t il = 0;
  std::size_t next_h = 0;
  for (std::size_t j = 0; j < n; ++j) {
    bool want_h = next_h < part.slots_h.size() && part.slots_h[next_h] == j;
    if (want_h) ++next_h;
    if ((want_h && ih < h.size()) || il >= l.size()) {
      seat[j] = h[ih++];
    } else {
      seat[j] = l[il++];
    }
  }
  return {std::move(part), Assignment(std::move(seat))};
}

namespace {

// For group g against bundle `theirs`: does removing item k restore the
// beta-scaled no-envy inequality?
template <typename Quantifier>
bool envy_bounded(const AuctionInstance& inst, const BidProfile& bids, GroupId g,
                  const std::vector<std::size_t>& mine,
                  const std::vector<std::size_t>& theirs, double beta, Quantifier q) {
  if (theirs.empty()) return true;
  const double own = group_value(inst, bids, g, mine);
  std::vector<bool> ok;
  ok.reserve(theirs.size());
  for (std::size_t k = 0; k < theirs.size(); ++k) {
    std::vector<std::size_t> rest;
    rest.reserve(theirs.size() - 1);
    for (std::size_t r = 0; r < theirs.size(); ++r) {
      if (r != k) rest.push_back(theirs[r]);
    }
    ok.push_back(own + kTolerance >= beta * group_value(inst, bids, g, rest));
  }
  return q(ok);
}

template <typename Quantifier>
bool verify(const AuctionInstance& inst, const BidProfile& bids,
            const GroupAllocation& alloc, double beta, Quantifier q) {
  for (GroupId g : kGroups) {
    if (!envy_bounded(inst, bids, g, alloc.of(g), alloc.of(other(g)), beta, q)) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool verify_ef1(const AuctionInstance& inst, const BidProfile& bids,
                const GroupAllocation& alloc, double beta) {
  return verify(inst, bids, alloc, beta, [](const std::vector<bool>& ok) {
    return std::any_of(ok.begin(), ok.end(), [](bool b) { return b; });
  });
}

bool verify_efx(const AuctionInstance& inst, const BidProfile& bids,
                const GroupAllocation& alloc, double beta) {
  return verify(inst, bids, alloc, beta, [](const std::vector<bool>& ok) {
    return std::all_of(ok.begin(), ok.end(), [](bool b) { return b; });
  });
}

}  // namespace fairgsp
