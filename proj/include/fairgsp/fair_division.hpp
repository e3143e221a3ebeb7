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

#ifndef FAIRGSP_FAIR_DIVISION_HPP_
#define FAIRGSP_FAIR_DIVISION_HPP_

#include <cstddef>
#include <vector>

#include "fairgsp/model.hpp"

namespace fairgsp {

// Fairness ratio beta = xi_l / xi_h with xi_h >= xi_l >= 1.
class Beta {
 public:
  // Throws Error(kInvalidArgument) unless xi_h >= xi_l >= 1.
  Beta(int xi_h, int xi_l);

  int xi_h() const { return xi_h_; }
  int xi_l() const { return xi_l_; }
  double value() const { return static_cast<double>(xi_l_) / xi_h_; }

 private:
  int xi_h_;
  int xi_l_;
};

// Partition of (a subset of) the slots between the two groups.
struct GroupAllocation {
  std::vector<std::size_t> slots_h;
  std::vector<std::size_t> slots_l;

  std::vector<std::size_t>& of(GroupId g) { return g == GroupId::H ? slots_h : slots_l; }
  const std::vector<std::size_t>& of(GroupId g) const {
    return g == GroupId::H ? slots_h : slots_l;
  }
};

// Slots held by each group under a full assignment.
GroupAllocation group_slots(const AuctionInstance& inst, const Assignment& asg);

// Best value group g extracts from `slots` on bids: the group's bids sorted
// descending are paired rank by rank with the slots sorted by descending
// CTR for g. Slots beyond the group's roster count as filled by a zero bid.
double group_value(const AuctionInstance& inst, const BidProfile& bids, GroupId g,
                   const std::vector<std::size_t>& slots);

// Members of group g in the order GSP placed them (ascending GSP slot).
std::vector<std::size_t> gsp_order(const AuctionInstance& inst, const Outcome& gsp_out,
                                   GroupId g);

// Weighted round robin: blocks of xi_h group-h bidders alternate with blocks
// of xi_l group-l bidders down the slots; once a group is exhausted the other
// fills the remaining slots. Within a group bidders keep their GSP order.
Assignment round_robin_ef1(const AuctionInstance& inst, const Outcome& gsp_out,
                           const Beta& beta);

struct GeceResult {
  // Slot partition computed by the envy-cycle phase.
  GroupAllocation partition;
  // Final matching. Equal to `partition` unless a group was handed more slots
  // than it has bidders, in which case the surplus goes to the other group.
  Assignment assignment;
};

// Group envy-cycle elimination. Requires n >= 2 and both groups nonempty.
GeceResult gece_efx(const AuctionInstance& inst, const BidProfile& bids,
                    const Outcome& gsp_out, double beta);

// Exhaustive checks of group beta-EF1 / beta-EFX on one bid profile, for both
// ordered pairs of groups. An empty opposing bundle always satisfies them.
bool verify_ef1(const AuctionInstance& inst, const BidProfile& bids,
                const GroupAllocation& alloc, double beta);
bool verify_efx(const AuctionInstance& inst, const BidProfile& bids,
                const GroupAllocation& alloc, double beta);

}  // namespace fairgsp

#endif  // FAIRGSP_FAIR_DIVISION_HPP_
