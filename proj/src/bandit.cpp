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

#include "fairgsp/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fairgsp/error.hpp"
#include "fairgsp/model.hpp"

namespace fairgsp {

namespace {

constexpr double kWeightCeiling = 1e200;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exp3_exploration(std::size_t arms, double expected_rounds) {
  if (arms <= 1 || expected_rounds <= 0.0) return 1.0;
  const double k = static_cast<double>(arms);
  return std::min(1.0, std::sqrt(k * std::log(k) / ((std::numbers::e - 1.0) * expected_rounds)));
}

Exp3State::Exp3State(std::size_t arms, Exp3Params params, std::uint64_t seed)
    : params_(params), weights_(arms, 1.0), rng_(seed) {
  if (arms == 0) throw Error(ErrorCode::kInvalidArgument, "Exp3 needs at least one arm");
  if (!(params.exploration_mix > 0.0 && params.exploration_mix <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "exploration mix must lie in (0, 1]");
  }
  if (!(params.learning_rate > 0.0) || !(params.reward_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "learning rate and reward scale must be positive");
  }
}

std::vector<double> Exp3State::distribution() const {
  const double k = static_cast<double>(weights_.size());
  double sum = 0.0;
  for (double w : weights_) sum += w;
  std::vector<double> p(weights_.size());
  const double mix = params_.exploration_mix;
  for (std::size_t a = 0; a < p.size(); ++a) {
    p[a] = (1.0 - mix) * weights_[a] / sum + mix / k;
  }
  return p;
}

Exp3Draw Exp3State::sample() {
  const auto p = distribution();
  const double u = uniform01(rng_);
  double acc = 0.0;
  for (std::size_t a = 0; a + 1 < p.size(); ++a) {
    acc += p[a];
    if (u < acc) return {a, p[a]};
  }
  return {p.size() - 1, p.back()};
}

void Exp3State::update(std::size_t arm, double reward, double probability) {
  if (arm >= weights_.size()) {
    throw Error(ErrorCode::kOutOfRange, "arm index out of range");
  }
  if (!(probability > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "probability used must be positive");
  }
  const double x = std::clamp(reward / params_.reward_scale, 0.0, 1.0);
  const double k = static_cast<double>(weights_.size());
  weights_[arm] *=
      std::exp(params_.learning_rate * params_.exploration_mix * x / (k * probability));
  const double top = *std::max_element(weights_.begin(), weights_.end());
  if (top > kWeightCeiling) {
    for (double& w : weights_) w = std::max(w / top, std::numeric_limits<double>::min());
  }
}

void Exp3State::set_weights(std::vector<double> weights) {
  if (weights.size() != weights_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "weight vector has the wrong length");
  }
  for (double w : weights) {
    if (!std::isfinite(w) || !(w > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "Exp3 weights must be finite and positive");
    }
  }
  weights_ = std::move(weights);
}

BayesianLearner::BayesianLearner(std::vector<double> type_grid, std::vector<double> bid_grid,
                                 std::vector<Exp3Params> per_type, std::uint64_t master_seed,
                                 std::uint64_t bidder)
    : type_grid_(std::move(type_grid)), bid_grid_(std::move(bid_grid)) {
  if (per_type.size() != type_grid_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one Exp3 parameter set per type is required");
  }
  per_type_.reserve(type_grid_.size());
  for (std::size_t v = 0; v < type_grid_.size(); ++v) {
    per_type_.emplace_back(bid_grid_.size(), per_type[v], derive_seed(master_seed, bidder, v));
  }
}

BidDecision BayesianLearner::act(double type) {
  auto idx = grid_index(type_grid_, type);
  if (idx < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "type " + std::to_string(type) + " is not on the type grid");
  }
  return act_index(static_cast<std::size_t>(idx));
}

BidDecision BayesianLearner::act_index(std::size_t type_index) {
  Exp3Draw d = per_type_.at(type_index).sample();
  return {type_index, d.arm, d.probability};
}

void BayesianLearner::learn(const BidDecision& decision, double reward) {
  per_type_.at(decision.type_index).update(decision.bid_index, reward, decision.probability);
}

RegretLedger::RegretLedger(const std::vector<std::size_t>& types_per_bidder,
                           const std::vector<std::size_t>& arms_per_bidder) {
  if (types_per_bidder.size() != arms_per_bidder.size()) {
    throw Error(ErrorCode::kInvalidArgument, "ledger shape mismatch");
  }
  cells_.resize(types_per_bidder.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    cells_[i].resize(types_per_bidder[i]);
    for (auto& c : cells_[i]) c.counterfactual.assign(arms_per_bidder[i], 0.0);
  }
}

void RegretLedger::record(std::size_t bidder, std::size_t type_index, double realized,
                          const std::vector<double>& counterfactual) {
  Cell& c = cells_.at(bidder).at(type_index);
  if (counterfactual.size() != c.counterfactual.size()) {
    throw Error(ErrorCode::kInvalidArgument, "counterfactual vector has the wrong length");
  }
  ++c.visits;
  c.realized += realized;
  for (std::size_t k = 0; k < counterfactual.size(); ++k) c.counterfactual[k] += counterfactual[k];
}

double RegretLedger::type_regret(std::size_t bidder, std::size_t type_index) const {
  const Cell& c = cells_.at(bidder).at(type_index);
  if (c.visits == 0) return 0.0;
  double best = *std::max_element(c.counterfactual.begin(), c.counterfactual.end());
  return best - c.realized;
}

double RegretLedger::regret(std::size_t bidder) const {
  const auto& row = cells_.at(bidder);
  if (row.empty()) return 0.0;
  double r = type_regret(bidder, 0);
  for (std::size_t v = 1; v < row.size(); ++v) r = std::max(r, type_regret(bidder, v));
  return r;
}

std::size_t RegretLedger::visits(std::size_t bidder, std::size_t type_index) const {
  return cells_.at(bidder).at(type_index).visits;
}

double RegretLedger::realized_sum(std::size_t bidder, std::size_t type_index) const {
  return cells_.at(bidder).at(type_index).realized;
}

const std::vector<double>& RegretLedger::counterfactual_sums(std::size_t bidder,
                                                             std::size_t type_index) const {
  return cells_.at(bidder).at(type_index).counterfactual;
}

void RegretLedger::merge(const RegretLedger& other) {
  if (other.cells_.size() != cells_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot merge ledgers of different shape");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (other.cells_[i].size() != cells_[i].size()) {
      throw Error(ErrorCode::kInvalidArgument, "cannot merge ledgers of different shape");
    }
    for (std::size_t v = 0; v < cells_[i].size(); ++v) {
      Cell& c = cells_[i][v];
      const Cell& o = other.cells_[i][v];
      if (o.counterfactual.size() != c.counterfactual.size()) {
        throw Error(ErrorCode::kInvalidArgument, "cannot merge ledgers of different shape");
      }
      c.visits += o.visits;
      c.realized += o.realized;
      for (std::size_t k = 0; k < c.counterfactual.size(); ++k) {
        c.counterfactual[k] += o.counterfactual[k];
      }
    }
  }
}

}  // namespace fairgsp
