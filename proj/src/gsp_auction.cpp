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

#include "fairgsp/gsp_auction.hpp"

#include <string>
#include <vector>

#include "fairgsp/error.hpp"

namespace fairgsp {

namespace {

void check_shape(const AuctionInstance& inst, std::size_t profile_size) {
  if (profile_size != inst.n_bidders()) {
    throw Error(ErrorCode::kInvalidArgument,
                "profile has " + std::to_string(profile_size) + " entries, expected " +
                    std::to_string(inst.n_bidders()));
  }
  if (inst.n_slots() != inst.n_bidders() ||
      inst.ctr[GroupId::L].size() != inst.n_bidders()) {
    throw Error(ErrorCode::kInvalidArgument, "instance must have n = m slots per group");
  }
}

// Shared by bid value and welfare: both are sum_i gamma * x_i * alpha.
GroupValues weighted_sum(const AuctionInstance& inst, const Assignment& asg,
                         const std::vector<double>& x) {
  GroupValues out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    GroupId g = inst.group(i);
    out.by_group[g] += inst.gamma(g) * x[i] * inst.alpha(asg.slot_of(i), g);
  }
  out.total = out.by_group[GroupId::H] + out.by_group[GroupId::L];
  return out;
}

}  // namespace

EffectiveBid effective_bid(const AuctionInstance& inst, const BidProfile& bids,
                           std::size_t bidder, std::size_t slot) {
  GroupId g = inst.group(bidder);
  return {bidder, slot, inst.gamma(g) * inst.alpha(slot, g) * bids[bidder]};
}

Outcome allocate_gsp(const AuctionInstance& inst, const BidProfile& bids) {
  check_shape(inst, bids.size());
  const std::size_t n = inst.n_bidders();

  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<bool> taken(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t best = n;
    double best_value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      double v = effective_bid(inst, bids, i, j).value;
      if (best == n || v > best_value + kTolerance) {
        best = i;
        best_value = v;
      }
    }
    taken[best] = true;
    order.push_back(best);
  }

  Outcome out;
  out.mechanism = MechanismTag::kGsp;
  out.payments.assign(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    std::size_t i = order[j];
    double gamma_i = inst.gamma(inst.group(i));
    if (gamma_i <= 0.0) {
      throw Error(ErrorCode::kDegenerateInstance,
                  "quality factor of group " + std::string(to_string(inst.group(i))) +
                      " is zero; GSP price is undefined");
    }
    out.payments[i] = effective_bid(inst, bids, order[j + 1], j).value / gamma_i;
  }
  out.assignment = Assignment(std::move(order));
  return out;
}

GroupValues gsp_value(const AuctionInstance& inst, const BidProfile& bids,
                      const Outcome& out) {
  check_shape(inst, bids.size());
  return weighted_sum(inst, out.assignment, bids.bids);
}

GroupValues social_welfare(const AuctionInstance& inst, const Outcome& out,
                           const ValuationProfile& vals) {
  check_shape(inst, vals.size());
  return weighted_sum(inst, out.assignment, vals.values);
}

}  // namespace fairgsp
