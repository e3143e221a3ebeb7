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

#ifndef FAIRGSP_SIMULATION_HPP_
#define FAIRGSP_SIMULATION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairgsp/bandit.hpp"
#include "fairgsp/composite.hpp"
#include "fairgsp/model.hpp"

namespace fairgsp {

// Explicit joint table over type-index profiles, for correlated types.
struct JointTypeTable {
  std::vector<std::vector<std::size_t>> profiles;
  std::vector<double> probabilities;
};

struct QualityDraw {
  PerGroup<double> gamma{{1.0, 1.0}};
  double probability = 1.0;
};

struct Distributions {
  // Product form: value_probs[i][k] = P(v_i = type_grid[i][k]).
  std::vector<std::vector<double>> value_probs;
  // When set, replaces the product form.
  std::optional<JointTypeTable> joint;
  std::vector<QualityDraw> quality{QualityDraw{}};

  // P(v_i = type_grid[i][k]) under either representation.
  double type_probability(std::size_t bidder, std::size_t type_index) const;
};

std::vector<std::string> validate_distributions(const AuctionInstance& inst,
                                                const Distributions& dists);

// Per-bidder Exp3 reward scale: alpha_{1,g} * max gamma_g * max type, plus
// the largest possible compensation for composite mechanisms. Utilities are
// clamped into [0, scale] before they reach the learner.
std::vector<double> reward_scales(const AuctionInstance& inst, const Distributions& dists,
                                  const MechanismSpec& scheme);

struct RoundLog {
  std::size_t t = 0;  // 1-based
  ValuationProfile types;
  std::vector<std::size_t> type_index;
  PerGroup<double> quality;
  BidProfile bids;
  std::vector<std::size_t> bid_index;
  CompositeResult result;
  std::vector<double> utilities;
};

// Realized utility of every bidder under the mechanism's final outcome.
std::vector<double> round_utilities(const AuctionInstance& inst, const CompositeResult& res,
                                    const ValuationProfile& vals);

// Utility of `bidder` had they bid `deviation`, everyone else unchanged.
double deviation_utility(const AuctionInstance& inst, const BidProfile& bids,
                         const ValuationProfile& vals, const MechanismSpec& scheme,
                         std::size_t bidder, double deviation);

struct RegretCheckpoint {
  std::size_t t = 0;
  std::vector<double> regret;  // R_i^t per bidder
};

struct RunMetrics {
  std::size_t rounds = 0;
  std::string mechanism;
  // Time averages of welfare.
  GroupValues sw_truthful_gsp;   // GSP with bids = types on each round's draw
  GroupValues sw_equilibrium;    // the run's mechanism at the learned bids
  GroupValues sw_gsp_same_bids;  // GSP allocation at the learned bids
  double gsp_payments_mean = 0.0;
  double compensation_mean = 0.0;
  // Cumulative sum(compensation) / sum(p^G) at every checkpoint and at T.
  std::vector<std::pair<std::size_t, double>> budget_balance_series;
  double budget_balance = 0.0;
  std::optional<double> poc;
  std::vector<double> reward_scale;
  // Empty unless regret tracking was enabled.
  std::vector<RegretCheckpoint> regret_curve;
  std::vector<std::vector<std::optional<double>>> bcce_gap;
  std::optional<double> max_bcce_gap;
  // max over bidders of gap / reward scale.
  std::optional<double> max_relative_bcce_gap;
};

struct DynamicOptions {
  // Exp3 learning rate; defaults to 1 / exploration_mix, which makes each
  // importance-weighted reward enter the exponent at rate 1/K.
  std::optional<double> learning_rate;
  bool track_regret = true;
  bool keep_logs = true;
  std::vector<std::size_t> checkpoints = {100, 1000, 10000};
};

struct DynamicResult {
  std::vector<RoundLog> logs;
  RunMetrics metrics;
  RegretLedger ledger;
};

// Repeated auction with one Bayesian Exp3 learner per bidder. Rounds draw
// types and quality factors, learners bid on their own type only, the
// mechanism runs and each learner is fed its realized utility.
DynamicResult run_dynamic(const AuctionInstance& inst, const Distributions& dists,
                          const MechanismSpec& scheme, std::size_t rounds,
                          std::uint64_t seed, const DynamicOptions& options = {});

// Per (bidder, type) best average deviation gain over the logged rounds with
// that type, recomputed from the log. Absent for unvisited types.
std::vector<std::vector<std::optional<double>>> bcce_gap(const std::vector<RoundLog>& logs,
                                                         const AuctionInstance& inst,
                                                         const MechanismSpec& scheme);

// E[SW of the run's mechanism] / E[SW of truthful GSP]; absent when the
// denominator vanishes.
std::optional<double> poc_estimate(const RunMetrics& metrics);

// Recomputes a round from (types, bids, quality).
RoundLog replay_round(const AuctionInstance& inst, const MechanismSpec& scheme,
                      const RoundLog& logged);

// Counts of each type index of `bidder` over the log.
std::vector<std::size_t> type_counts(const std::vector<RoundLog>& logs,
                                     const AuctionInstance& inst, std::size_t bidder);

}  // namespace fairgsp

#endif  // FAIRGSP_SIMULATION_HPP_
