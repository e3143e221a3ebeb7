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

#include "fairgsp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairgsp/error.hpp"

namespace fairgsp {

std::string_view to_string(GroupId g) { return g == GroupId::H ? "H" : "L"; }

std::string_view to_string(MechanismTag tag) {
  switch (tag) {
    case MechanismTag::kGsp:
      return "gsp";
    case MechanismTag::kBetaFairGsp:
      return "beta-fair";
    case MechanismTag::kGspEfx:
      return "gsp-efx";
  }
  return "unknown";
}

std::vector<std::size_t> AuctionInstance::members(GroupId g) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < group_of.size(); ++i) {
    if (group_of[i] == g) out.push_back(i);
  }
  return out;
}

namespace {

bool ascending(const std::vector<double>& grid) {
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> validate_instance(const AuctionInstance& inst) {
  std::vector<std::string> issues;
  const std::size_t n = inst.n_bidders();
  if (n == 0) issues.emplace_back("instance has no bidders");

  for (GroupId g : kGroups) {
    const auto& curve = inst.ctr[g];
    if (curve.size() != n) {
      std::ostringstream os;
      os << "ctr for group " << to_string(g) << " has " << curve.size()
         << " slots, expected " << n << " (n = m)";
      issues.push_back(os.str());
    }
    bool in_range = true;
    for (double a : curve) {
      if (!std::isfinite(a) || a < 0.0 || a > 1.0) in_range = false;
    }
    if (!in_range) {
      issues.push_back("ctr outside [0,1] for group " + std::string(to_string(g)));
    }
    for (std::size_t j = 1; j < curve.size(); ++j) {
      if (curve[j] > curve[j - 1] + kTolerance) {
        issues.push_back("ctr not monotone for group " + std::string(to_string(g)));
        break;
      }
    }
    double q = inst.quality[g];
    if (!std::isfinite(q) || q < 0.0 || q > 1.0) {
      issues.push_back("quality factor outside [0,1] for group " +
                       std::string(to_string(g)));
    } else if (q <= 0.0) {
      issues.push_back("quality factor is zero for group " + std::string(to_string(g)));
    }
  }

  if (inst.bid_grid.size() != n || inst.type_grid.size() != n) {
    issues.emplace_back("bid/type grids must have one entry per bidder");
    return issues;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& bids = inst.bid_grid[i];
    const auto& types = inst.type_grid[i];
    const std::string who = "bidder " + std::to_string(i + 1);
    if (bids.empty() || types.empty()) {
      issues.push_back("empty bid or type grid for " + who);
      continue;
    }
    if (!ascending(bids)) issues.push_back("bid grid not strictly ascending for " + who);
    if (!ascending(types)) issues.push_back("type grid not strictly ascending for " + who);
    if (bids.front() < 0.0 || types.front() < 0.0) {
      issues.push_back("negative grid value for " + who);
    }
    if (bids.back() + kTolerance < types.back()) {
      issues.push_back("bid grid does not dominate type grid for " + who);
    }
  }
  return issues;
}

void require_valid(const AuctionInstance& inst) {
  auto issues = validate_instance(inst);
  if (issues.empty()) return;
  std::string msg = "invalid auction instance:";
  for (const auto& s : issues) msg += "\n  - " + s;
  throw Error(ErrorCode::kValidation, msg);
}

std::ptrdiff_t grid_index(std::span<const double> grid, double value) {
  auto it = std::lower_bound(grid.begin(), grid.end(), value - kTolerance);
  if (it != grid.end() && std::abs(*it - value) <= kTolerance) {
    return it - grid.begin();
  }
  return -1;
}

bool on_bid_grid(const AuctionInstance& inst, const BidProfile& bids) {
  if (bids.size() != inst.n_bidders() || inst.bid_grid.size() != bids.size()) return false;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (grid_index(inst.bid_grid[i], bids[i]) < 0) return false;
  }
  return true;
}

bool on_type_grid(const AuctionInstance& inst, const ValuationProfile& vals) {
  if (vals.size() != inst.n_bidders() || inst.type_grid.size() != vals.size()) return false;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (grid_index(inst.type_grid[i], vals[i]) < 0) return false;
  }
  return true;
}

Assignment::Assignment(std::vector<std::size_t> bidder_at_slot)
    : bidder_at_slot_(std::move(bidder_at_slot)),
      slot_of_bidder_(bidder_at_slot_.size(), bidder_at_slot_.size()) {
  const std::size_t n = bidder_at_slot_.size();
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t i = bidder_at_slot_[j];
    if (i >= n || slot_of_bidder_[i] != n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "assignment is not a perfect matching of slots to bidders");
    }
    slot_of_bidder_[i] = j;
  }
}

double utility(const AuctionInstance& inst, const Outcome& out,
               const ValuationProfile& vals, std::size_t bidder) {
  if (bidder >= inst.n_bidders() || bidder >= out.payments.size() ||
      bidder >= vals.size() || bidder >= out.assignment.size()) {
    throw Error(ErrorCode::kOutOfRange,
                "bidder index " + std::to_string(bidder) + " out of range");
  }
  GroupId g = inst.group(bidder);
  std::size_t slot = out.assignment.slot_of(bidder);
  return inst.alpha(slot, g) * inst.gamma(g) * vals[bidder] - out.payments[bidder];
}

}  // namespace fairgsp
