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

#ifndef FAIRGSP_GSP_AUCTION_HPP_
#define FAIRGSP_GSP_AUCTION_HPP_

#include <cstddef>

#include "fairgsp/model.hpp"

namespace fairgsp {

struct EffectiveBid {
  std::size_t bidder = 0;
  std::size_t slot = 0;
  double value = 0.0;  // gamma_{g(i)} * alpha_{j,g(i)} * b_i
};

EffectiveBid effective_bid(const AuctionInstance& inst, const BidProfile& bids,
                           std::size_t bidder, std::size_t slot);

// Generalized Second Price: slots are filled in order, each going to the
// unassigned bidder with the highest effective bid for that slot (ties to the
// lowest bidder index). The occupant of slot j pays the effective bid, at slot
// j, of the bidder placed in slot j+1, divided by its own quality factor; the
// last slot pays nothing.
//
// Throws Error(kDegenerateInstance) if a priced bidder's group has quality 0.
Outcome allocate_gsp(const AuctionInstance& inst, const BidProfile& bids);

struct GroupValues {
  double total = 0.0;
  PerGroup<double> by_group;
};

// Value of an allocation measured on bids:
// sum_i gamma_{g(i)} * b_i * alpha_{slot(i), g(i)}.
GroupValues gsp_value(const AuctionInstance& inst, const BidProfile& bids,
                      const Outcome& out);

// Same sum measured on valuations.
GroupValues social_welfare(const AuctionInstance& inst, const Outcome& out,
                           const ValuationProfile& vals);

}  // namespace fairgsp

#endif  // FAIRGSP_GSP_AUCTION_HPP_
