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

#include "fairgsp/composite.hpp"

#include <limits>
#include <sstream>

namespace fairgsp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

MechanismTag tag_of(const MechanismSpec& spec) {
  return std::visit(Overloaded{
                        [](const PlainGsp&) { return MechanismTag::kGsp; },
                        [](const BetaFairGsp&) { return MechanismTag::kBetaFairGsp; },
                        [](const GspEfx&) { return MechanismTag::kGspEfx; },
                    },
                    spec);
}

std::string describe(const MechanismSpec& spec) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const PlainGsp&) { os << "gsp"; },
                 [&](const BetaFairGsp& s) {
                   os << "beta-fair(xi_h=" << s.beta.xi_h() << ",xi_l=" << s.beta.xi_l()
                      << ")";
                 },
                 [&](const GspEfx& s) { os << "gsp-efx(beta=" << s.beta << ")"; },
             },
             spec);
  return os.str();
}

double total(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

CompositeResult compose(const AuctionInstance& inst, const BidProfile& bids,
                        const MechanismSpec& scheme) {
  CompositeResult res;
  res.gsp_outcome = allocate_gsp(inst, bids);
  const Outcome& gsp = res.gsp_outcome;

  Assignment fair = std::visit(
      Overloaded{
          [&](const PlainGsp&) { return gsp.assignment; },
          [&](const BetaFairGsp& s) { return round_robin_ef1(inst, gsp, s.beta); },
          [&](const GspEfx& s) {
            GeceResult r = gece_efx(inst, bids, gsp, s.beta);
            res.partition = std::move(r.partition);
            return std::move(r.assignment);
          },
      },
      scheme);

  const std::size_t n = inst.n_bidders();
  res.fair_outcome.mechanism = tag_of(scheme);
  res.fair_outcome.payments = gsp.payments;
  res.compensation.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t old_slot = gsp.assignment.slot_of(i);
    std::size_t new_slot = fair.slot_of(i);
    if (new_slot <= old_slot) continue;
    GroupId g = inst.group(i);
    double loss = bids[i] * inst.gamma(g) * (inst.alpha(old_slot, g) - inst.alpha(new_slot, g));
    res.compensation[i] = 2.0 * loss;
    res.fair_outcome.payments[i] = gsp.payments[i] - 2.0 * loss;
  }
  res.fair_outcome.assignment = std::move(fair);

  res.value_gsp = gsp_value(inst, bids, gsp);
  res.value_fair = gsp_value(inst, bids, res.fair_outcome);
  res.assumption_minority_gains =
      res.value_fair.by_group[GroupId::L] + kTolerance >= res.value_gsp.by_group[GroupId::L];
  res.assumption_h_first = n > 0 && inst.group(gsp.assignment.bidder_at(0)) == GroupId::H;
  return res;
}

double budget_balance_fraction(const CompositeResult& res) {
  const double paid = total(res.gsp_outcome.payments);
  const double comp = total(res.compensation);
  if (paid <= 0.0) {
    return comp > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return comp / paid;
}

}  // namespace fairgsp
