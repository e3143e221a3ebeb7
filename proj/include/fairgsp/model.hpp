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

#ifndef FAIRGSP_MODEL_HPP_
#define FAIRGSP_MODEL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairgsp {

// Absolute tolerance used for every comparison between grid values, bids,
// click-through rates and sums thereof.
inline constexpr double kTolerance = 1e-12;

enum class GroupId : std::uint8_t { H = 0, L = 1 };

inline constexpr std::array<GroupId, 2> kGroups = {GroupId::H, GroupId::L};

constexpr std::size_t index_of(GroupId g) { return static_cast<std::size_t>(g); }
constexpr GroupId other(GroupId g) {
  return g == GroupId::H ? GroupId::L : GroupId::H;
}
std::string_view to_string(GroupId g);

// Per-group pair of values indexed by GroupId.
template <typename T>
struct PerGroup {
  std::array<T, 2> values{};

  T& operator[](GroupId g) { return values[index_of(g)]; }
  const T& operator[](GroupId g) const { return values[index_of(g)]; }
};

// Static market data for one auction. Slots and bidders are 0-based
// internally; human-facing messages use 1-based numbering.
struct AuctionInstance {
  std::vector<GroupId> group_of;
  // ctr[g][j]: click-through rate of slot j for ads of group g.
  PerGroup<std::vector<double>> ctr;
  // Current realization of the quality factors.
  PerGroup<double> quality{{1.0, 1.0}};
  std::vector<std::vector<double>> bid_grid;
  std::vector<std::vector<double>> type_grid;

  std::size_t n_bidders() const { return group_of.size(); }
  std::size_t n_slots() const { return ctr[GroupId::H].size(); }

  GroupId group(std::size_t bidder) const { return group_of.at(bidder); }
  double alpha(std::size_t slot, GroupId g) const { return ctr[g][slot]; }
  double gamma(GroupId g) const { return quality[g]; }

  std::vector<std::size_t> members(GroupId g) const;
};

// Returns one human-readable line per violated invariant; empty iff the
// instance is admissible.
std::vector<std::string> validate_instance(const AuctionInstance& inst);

// Throws Error(kValidation) listing every violation when the instance is not
// admissible.
void require_valid(const AuctionInstance& inst);

struct BidProfile {
  std::vector<double> bids;

  std::size_t size() const { return bids.size(); }
  double operator[](std::size_t i) const { return bids[i]; }
};

struct ValuationProfile {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

// True when every bid lies on its bidder's grid (within kTolerance).
bool on_bid_grid(const AuctionInstance& inst, const BidProfile& bids);
bool on_type_grid(const AuctionInstance& inst, const ValuationProfile& vals);

// Index of `value` in an ascending grid, or -1 if absent.
std::ptrdiff_t grid_index(std::span<const double> grid, double value);

// Perfect matching between slots and bidders, kept in both directions.
class Assignment {
 public:
  Assignment() = default;
  // Throws Error(kInvalidArgument) if `bidder_at_slot` is not a permutation.
  explicit Assignment(std::vector<std::size_t> bidder_at_slot);

  std::size_t size() const { return bidder_at_slot_.size(); }
  std::size_t bidder_at(std::size_t slot) const { return bidder_at_slot_.at(slot); }
  std::size_t slot_of(std::size_t bidder) const { return slot_of_bidder_.at(bidder); }
  const std::vector<std::size_t>& bidder_at_slot() const { return bidder_at_slot_; }
  const std::vector<std::size_t>& slot_of_bidder() const { return slot_of_bidder_; }

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<std::size_t> bidder_at_slot_;
  std::vector<std::size_t> slot_of_bidder_;
};

enum class MechanismTag { kGsp, kBetaFairGsp, kGspEfx };
std::string_view to_string(MechanismTag tag);

struct Outcome {
  Assignment assignment;
  // Negative entries are net compensations paid to the bidder.
  std::vector<double> payments;
  MechanismTag mechanism = MechanismTag::kGsp;
};

// alpha_{slot(i), g(i)} * gamma_{g(i)} * v_i - p_i.
double utility(const AuctionInstance& inst, const Outcome& out,
               const ValuationProfile& vals, std::size_t bidder);

}  // namespace fairgsp

#endif  // FAIRGSP_MODEL_HPP_
