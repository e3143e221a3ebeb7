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

#ifndef FAIRGSP_BANDIT_HPP_
#define FAIRGSP_BANDIT_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace fairgsp {

// Deterministic per-stream seeds from a master seed (splitmix64 mixing), so
// each (bidder, type) learner owns an independent reproducible stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

// Standard horizon-tuned exploration rate
// min(1, sqrt(K ln K / ((e - 1) T))); 1 when K == 1 or T == 0.
double exp3_exploration(std::size_t arms, double expected_rounds);

struct Exp3Params {
  double exploration_mix = 0.1;
  double learning_rate = 0.1;
  double reward_scale = 1.0;
};

struct Exp3Draw {
  std::size_t arm = 0;
  double probability = 0.0;
};

// Exponential weights for adversarial bandits.
class Exp3State {
 public:
  // Throws Error(kInvalidArgument) on K == 0 or out-of-range parameters.
  Exp3State(std::size_t arms, Exp3Params params, std::uint64_t seed);

  std::size_t arms() const { return weights_.size(); }
  const Exp3Params& params() const { return params_; }
  const std::vector<double>& weights() const { return weights_; }

  // Sampling distribution (1 - mix) w_k / sum w + mix / K.
  std::vector<double> distribution() const;

  Exp3Draw sample();

  // Multiplies the chosen arm's weight by
  // exp(learning_rate * mix * (reward / reward_scale) / (K * probability)),
  // with reward clamped into [0, reward_scale].
  void update(std::size_t arm, double reward, double probability);

  // Replaces the weights; throws Error(kInvalidArgument) unless every weight
  // is finite and strictly positive.
  void set_weights(std::vector<double> weights);

  bool operator==(const Exp3State& other) const {
    return weights_ == other.weights_ && rng_ == other.rng_;
  }

 private:
  Exp3Params params_;
  std::vector<double> weights_;
  std::mt19937_64 rng_;
};

struct BidDecision {
  std::size_t type_index = 0;
  std::size_t bid_index = 0;
  double probability = 0.0;
};

// One Exp3 learner per type of a single bidder; only the learner of the
// realized type acts and learns in a given round.
class BayesianLearner {
 public:
  BayesianLearner(std::vector<double> type_grid, std::vector<double> bid_grid,
                  std::vector<Exp3Params> per_type, std::uint64_t master_seed,
                  std::uint64_t bidder);

  // Throws Error(kInvalidArgument) if `type` is not on the type grid.
  BidDecision act(double type);
  BidDecision act_index(std::size_t type_index);
  void learn(const BidDecision& decision, double reward);

  double bid_value(std::size_t bid_index) const { return bid_grid_.at(bid_index); }
  const std::vector<double>& type_grid() const { return type_grid_; }
  const std::vector<double>& bid_grid() const { return bid_grid_; }
  const Exp3State& state(std::size_t type_index) const { return per_type_.at(type_index); }

 private:
  std::vector<double> type_grid_;
  std::vector<double> bid_grid_;
  std::vector<Exp3State> per_type_;
};

// Full-information regret bookkeeping for every (bidder, type) pair. Fed by
// the simulator; the learners themselves only see their own reward.
class RegretLedger {
 public:
  RegretLedger() = default;
  // arms_per_bidder[i] = |B_i|, types_per_bidder[i] = |V_i|.
  RegretLedger(const std::vector<std::size_t>& types_per_bidder,
               const std::vector<std::size_t>& arms_per_bidder);

  // counterfactual[k] = utility bidder i would have had bidding grid bid k
  // this round, everyone else unchanged.
  void record(std::size_t bidder, std::size_t type_index, double realized,
              const std::vector<double>& counterfactual);

  // R_v = max_b sum_t 1[v_t = v] (u_t(b) - u_t(b_t)); 0 for an empty ledger.
  double type_regret(std::size_t bidder, std::size_t type_index) const;
  // max over types of type_regret.
  double regret(std::size_t bidder) const;
  std::size_t visits(std::size_t bidder, std::size_t type_index) const;
  double realized_sum(std::size_t bidder, std::size_t type_index) const;
  const std::vector<double>& counterfactual_sums(std::size_t bidder,
                                                 std::size_t type_index) const;

  std::size_t n_bidders() const { return cells_.size(); }
  std::size_t n_types(std::size_t bidder) const { return cells_.at(bidder).size(); }

  // Adds another ledger's sums (same shape) into this one.
  void merge(const RegretLedger& other);

 private:
  struct Cell {
    std::size_t visits = 0;
    double realized = 0.0;
    std::vector<double> counterfactual;
  };
  std::vector<std::vector<Cell>> cells_;
};

}  // namespace fairgsp

#endif  // FAIRGSP_BANDIT_HPP_
