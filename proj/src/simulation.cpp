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

#include "fairgsp/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairgsp/error.hpp"
#include "fairgsp/gsp_auction.hpp"

namespace fairgsp {

namespace {

constexpr double kProbabilityTolerance = 1e-9;
constexpr std::uint64_t kEnvironmentStream = 0xE5A7'0000'0000'0001ULL;

std::size_t draw_index(const std::vector<double>& probs, double u) {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last = k;
    acc += probs[k];
    if (u < acc) return k;
  }
  return last;
}

bool is_composite(const MechanismSpec& scheme) {
  return !std::holds_alternative<PlainGsp>(scheme);
}

void add_into(GroupValues& acc, const GroupValues& x) {
  for (GroupId g : kGroups) acc.by_group[g] += x.by_group[g];
}

GroupValues averaged(GroupValues acc, std::size_t rounds) {
  if (rounds == 0) return acc;
  for (GroupId g : kGroups) acc.by_group[g] /= static_cast<double>(rounds);
  acc.total = acc.by_group[GroupId::H] + acc.by_group[GroupId::L];
  return acc;
}

}  // namespace

double Distributions::type_probability(std::size_t bidder, std::size_t type_index) const {
  if (!joint) return value_probs.at(bidder).at(type_index);
  double p = 0.0;
  for (std::size_t r = 0; r < joint->profiles.size(); ++r) {
    if (joint->profiles[r].at(bidder) == type_index) p += joint->probabilities[r];
  }
  return p;
}

std::vector<std::string> validate_distributions(const AuctionInstance& inst,
                                                const Distributions& dists) {
  std::vector<std::string> issues;
  const std::size_t n = inst.n_bidders();
  auto check_sum = [&](const std::vector<double>& ps, const std::string& what) {
    double s = 0.0;
    for (double p : ps) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        issues.push_back(what + " has a negative or non-finite probability");
        return;
      }
      s += p;
    }
    if (std::abs(s - 1.0) > kProbabilityTolerance) {
      std::ostringstream os;
      os << what << " sums to " << s << ", not 1";
      issues.push_back(os.str());
    }
  };

  if (dists.joint) {
    const auto& j = *dists.joint;
    if (j.profiles.size() != j.probabilities.size() || j.profiles.empty()) {
      issues.emplace_back("joint type table is empty or ragged");
    } else {
      for (const auto& row : j.profiles) {
        bool ok = row.size() == n;
        for (std::size_t i = 0; ok && i < n; ++i) ok = row[i] < inst.type_grid.at(i).size();
        if (!ok) {
          issues.emplace_back("joint type table row does not index the type grids");
          break;
        }
      }
      check_sum(j.probabilities, "joint type table");
    }
  } else if (dists.value_probs.size() != n) {
    issues.emplace_back("value distribution needs one entry per bidder");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string who = "value distribution of bidder " + std::to_string(i + 1);
      if (i < inst.type_grid.size() && dists.value_probs[i].size() != inst.type_grid[i].size()) {
        issues.push_back(who + " does not match its type grid");
        continue;
      }
      check_sum(dists.value_probs[i], who);
    }
  }

  if (dists.quality.empty()) {
    issues.emplace_back("quality distribution is empty");
  } else {
    std::vector<double> ps;
    for (const auto& q : dists.quality) {
      ps.push_back(q.probability);
      for (GroupId g : kGroups) {
        if (!(q.gamma[g] > 0.0 && q.gamma[g] <= 1.0)) {
          issues.emplace_back("quality factor outside (0,1] in quality distribution");
        }
      }
    }
    check_sum(ps, "quality distribution");
  }
  return issues;
}

std::vector<double> reward_scales(const AuctionInstance& inst, const Distributions& dists,
                                 const MechanismSpec& scheme) {
  PerGroup<double> gmax{{0.0, 0.0}};
  for (const auto& q : dists.quality) {
    if (q.probability <= 0.0) continue;
    for (GroupId g : kGroups) gmax[g] = std::max(gmax[g], q.gamma[g]);
  }
  std::vector<double> scales(inst.n_bidders());
  for (std::size_t i = 0; i < scales.size(); ++i) {
    GroupId g = inst.group(i);
    const double a1 = inst.ctr[g].front();
    double hi = a1 * gmax[g] * inst.type_grid[i].back();
    // Largest compensation a displaced bidder can collect.
    if (is_composite(scheme)) hi += 2.0 * inst.bid_grid[i].back() * gmax[g] * a1;
    scales[i] = hi > 0.0 ? hi : 1.0;
  }
  return scales;
}

std::vector<double> round_utilities(const AuctionInstance& inst, const CompositeResult& res,
                                    const ValuationProfile& vals) {
  std::vector<double> u(inst.n_bidders());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = utility(inst, res.fair_outcome, vals, i);
  return u;
}

double deviation_utility(const AuctionInstance& inst, const BidProfile& bids,
                         const ValuationProfile& vals, const MechanismSpec& scheme,
                         std::size_t bidder, double deviation) {
  BidProfile alt = bids;
  alt.bids.at(bidder) = deviation;
  CompositeResult res = compose(inst, alt, scheme);
  return utility(inst, res.fair_outcome, vals, bidder);
}

DynamicResult run_dynamic(const AuctionInstance& inst, const Distributions& dists,
                          const MechanismSpec& scheme, std::size_t rounds,
                          std::uint64_t seed, const DynamicOptions& options) {
  require_valid(inst);
  if (auto issues = validate_distributions(inst, dists); !issues.empty()) {
    std::string msg = "invalid distributions:";
    for (const auto& s : issues) msg += "\n  - " + s;
    throw Error(ErrorCode::kValidation, msg);
  }
  const std::size_t n = inst.n_bidders();
  const auto scales = reward_scales(inst, dists, scheme);

  std::vector<BayesianLearner> learners;
  learners.reserve(n);
  std::vector<std::size_t> n_types(n);
  std::vector<std::size_t> n_arms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t arms = inst.bid_grid[i].size();
    std::vector<Exp3Params> params;
    for (std::size_t v = 0; v < inst.type_grid[i].size(); ++v) {
      const double expected = static_cast<double>(rounds) * dists.type_probability(i, v);
      const double mix = exp3_exploration(arms, expected);
      const double rate = options.learning_rate ? *options.learning_rate : 1.0 / mix;
      params.push_back({mix, rate, scales[i]});
    }
    learners.emplace_back(inst.type_grid[i], inst.bid_grid[i], std::move(params), seed, i);
    n_types[i] = inst.type_grid[i].size();
    n_arms[i] = arms;
  }

  DynamicResult out;
  if (options.track_regret) out.ledger = RegretLedger(n_types, n_arms);
  if (options.keep_logs) out.logs.reserve(rounds);

  std::vector<std::size_t> checkpoints;
  for (std::size_t c : options.checkpoints) {
    if (c > 0 && c < rounds) checkpoints.push_back(c);
  }
  if (rounds > 0) checkpoints.push_back(rounds);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  std::size_t next_checkpoint = 0;

  std::vector<double> quality_probs;
  for (const auto& q : dists.quality) quality_probs.push_back(q.probability);

  std::mt19937_64 env(derive_seed(seed, kEnvironmentStream));
  AuctionInstance work = inst;
  RunMetrics& m = out.metrics;
  m.rounds = rounds;
  m.mechanism = describe(scheme);
  m.reward_scale = scales;

  GroupValues sum_truthful;
  GroupValues sum_eq;
  GroupValues sum_gsp;
  double sum_paid = 0.0;
  double sum_comp = 0.0;

  std::vector<std::size_t> tidx(n);
  std::vector<BidDecision> decisions(n);
  std::vector<double> cf;
  for (std::size_t t = 1; t <= rounds; ++t) {
    if (dists.joint) {
      tidx = dists.joint->profiles[draw_index(dists.joint->probabilities, uniform01(env))];
    } else {
      for (std::size_t i = 0; i < n; ++i) tidx[i] = draw_index(dists.value_probs[i], uniform01(env));
    }
    const QualityDraw& q = dists.quality[draw_index(quality_probs, uniform01(env))];
    work.quality = q.gamma;

    ValuationProfile vals;
    BidProfile bids;
    std::vector<std::size_t> bid_index(n);
    vals.values.resize(n);
    bids.bids.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      vals.values[i] = inst.type_grid[i][tidx[i]];
      decisions[i] = learners[i].act_index(tidx[i]);
      bid_index[i] = decisions[i].bid_index;
      bids.bids[i] = inst.bid_grid[i][bid_index[i]];
    }

    CompositeResult res = compose(work, bids, scheme);
    std::vector<double> utils = round_utilities(work, res, vals);
    for (std::size_t i = 0; i < n; ++i) learners[i].learn(decisions[i], utils[i]);

    if (options.track_regret) {
      for (std::size_t i = 0; i < n; ++i) {
        cf.assign(n_arms[i], 0.0);
        for (std::size_t k = 0; k < n_arms[i]; ++k) {
          cf[k] = k == bid_index[i]
                      ? utils[i]
                      : deviation_utility(work, bids, vals, scheme, i, inst.bid_grid[i][k]);
        }
        out.ledger.record(i, tidx[i], utils[i], cf);
      }
    }

    ValuationProfile truthful_bids = vals;
    Outcome truthful = allocate_gsp(work, BidProfile{truthful_bids.values});
    add_into(sum_truthful, social_welfare(work, truthful, vals));
    add_into(sum_eq, social_welfare(work, res.fair_outcome, vals));
    add_into(sum_gsp, social_welfare(work, res.gsp_outcome, vals));
    sum_paid += total(res.gsp_outcome.payments);
    sum_comp += total(res.compensation);

    if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t) {
      const double frac = sum_paid > 0.0 ? sum_comp / sum_paid : 0.0;
      m.budget_balance_series.emplace_back(t, frac);
      if (options.track_regret) {
        RegretCheckpoint cp;
        cp.t = t;
        for (std::size_t i = 0; i < n; ++i) cp.regret.push_back(out.ledger.regret(i));
        m.regret_curve.push_back(std::move(cp));
      }
      ++next_checkpoint;
    }

    if (options.keep_logs) {
      RoundLog log;
      log.t = t;
      log.types = std::move(vals);
      log.type_index = tidx;
      log.quality = q.gamma;
      log.bids = std::move(bids);
      log.bid_index = std::move(bid_index);
      log.result = std::move(res);
      log.utilities = std::move(utils);
      out.logs.push_back(std::move(log));
    }
  }

  m.sw_truthful_gsp = averaged(sum_truthful, rounds);
  m.sw_equilibrium = averaged(sum_eq, rounds);
  m.sw_gsp_same_bids = averaged(sum_gsp, rounds);
  if (rounds > 0) {
    m.gsp_payments_mean = sum_paid / static_cast<double>(rounds);
    m.compensation_mean = sum_comp / static_cast<double>(rounds);
  }
  m.budget_balance = sum_paid > 0.0 ? sum_comp / sum_paid : 0.0;
  m.poc = poc_estimate(m);

  if (options.track_regret) {
    m.bcce_gap.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t v = 0; v < n_types[i]; ++v) {
        std::optional<double> gap;
        if (std::size_t c = out.ledger.visits(i, v); c > 0) {
          gap = out.ledger.type_regret(i, v) / static_cast<double>(c);
          double rel = *gap / scales[i];
          m.max_bcce_gap = m.max_bcce_gap ? std::max(*m.max_bcce_gap, *gap) : *gap;
          m.max_relative_bcce_gap =
              m.max_relative_bcce_gap ? std::max(*m.max_relative_bcce_gap, rel) : rel;
        }
        m.bcce_gap[i].push_back(gap);
      }
    }
  }
  return out;
}

std::vector<std::vector<std::optional<double>>> bcce_gap(const std::vector<RoundLog>& logs,
                                                         const AuctionInstance& inst,
                                                         const MechanismSpec& scheme) {
  const std::size_t n = inst.n_bidders();
  std::vector<std::vector<std::vector<double>>> gain(n);
  std::vector<std::vector<std::size_t>> visits(n);
  for (std::size_t i = 0; i < n; ++i) {
    gain[i].assign(inst.type_grid[i].size(), std::vector<double>(inst.bid_grid[i].size(), 0.0));
    visits[i].assign(inst.type_grid[i].size(), 0);
  }
  AuctionInstance work = inst;
  for (const RoundLog& log : logs) {
    work.quality = log.quality;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v = log.type_index[i];
      ++visits[i][v];
      for (std::size_t k = 0; k < inst.bid_grid[i].size(); ++k) {
        const double dev = k == log.bid_index[i]
                               ? log.utilities[i]
                               : deviation_utility(work, log.bids, log.types, scheme, i,
                                                   inst.bid_grid[i][k]);
        gain[i][v][k] += dev - log.utilities[i];
      }
    }
  }
  std::vector<std::vector<std::optional<double>>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < gain[i].size(); ++v) {
      if (visits[i][v] == 0) {
        out[i].emplace_back();
        continue;
      }
      double best = *std::max_element(gain[i][v].begin(), gain[i][v].end());
      out[i].emplace_back(best / static_cast<double>(visits[i][v]));
    }
  }
  return out;
}

std::optional<double> poc_estimate(const RunMetrics& metrics) {
  if (metrics.rounds == 0 || !(metrics.sw_truthful_gsp.total > 0.0)) return std::nullopt;
  return metrics.sw_equilibrium.total / metrics.sw_truthful_gsp.total;
}

RoundLog replay_round(const AuctionInstance& inst, const MechanismSpec& scheme,
                      const RoundLog& logged) {
  AuctionInstance work = inst;
  work.quality = logged.quality;
  RoundLog out;
  out.t = logged.t;
  out.types = logged.types;
  out.type_index = logged.type_index;
  out.quality = logged.quality;
  out.bids = logged.bids;
  out.bid_index = logged.bid_index;
  out.result = compose(work, out.bids, scheme);
  out.utilities = round_utilities(work, out.result, out.types);
  return out;
}

std::vector<std::size_t> type_counts(const std::vector<RoundLog>& logs,
                                     const AuctionInstance& inst, std::size_t bidder) {
  std::vector<std::size_t> counts(inst.type_grid.at(bidder).size(), 0);
  for (const auto& log : logs) ++counts.at(log.type_index.at(bidder));
  return counts;
}

}  // namespace fairgsp
