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

#ifndef FAIRGSP_COMPOSITE_HPP_
#define FAIRGSP_COMPOSITE_HPP_

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fairgsp/fair_division.hpp"
#include "fairgsp/gsp_auction.hpp"
#include "fairgsp/model.hpp"

namespace fairgsp {

struct PlainGsp {};
struct BetaFairGsp {
  Beta beta{1, 1};
};
struct GspEfx {
  double beta = 1.0;
};

// Which mechanism a run uses. PlainGsp composes GSP with the identity.
using MechanismSpec = std::variant<PlainGsp, BetaFairGsp, GspEfx>;

MechanismTag tag_of(const MechanismSpec& spec);
std::string describe(const MechanismSpec& spec);

struct CompositeResult {
  Outcome gsp_outcome;
  Outcome fair_outcome;
  // p^G_i - p^C_i; zero for anyone not pushed to a worse slot.
  std::vector<double> compensation;
  GroupValues value_gsp;
  GroupValues value_fair;
  // Slot partition of the envy-cycle phase, when the scheme has one.
  std::optional<GroupAllocation> partition;
  // Observed, not assumed: the minority value does not drop, and slot 1 goes
  // to group h under GSP.
  bool assumption_minority_gains = false;
  bool assumption_h_first = false;

  bool assumptions_hold() const { return assumption_minority_gains && assumption_h_first; }
};

// GSP followed by the selected fair-division scheme. A bidder moved to a
// worse slot pays p^G - 2 b_i gamma (alpha_old - alpha_new); everyone else
// keeps the GSP price.
CompositeResult compose(const AuctionInstance& inst, const BidProfile& bids,
                        const MechanismSpec& scheme);

// Sum of compensation over sum of GSP payments. +inf when GSP collects
// nothing but compensation is positive; 0 when both vanish.
double budget_balance_fraction(const CompositeResult& res);

double total(const std::vector<double>& xs);

}  // namespace fairgsp

#endif  // FAIRGSP_COMPOSITE_HPP_
