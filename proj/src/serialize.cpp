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

#include "fairgsp/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "fairgsp/error.hpp"

namespace fairgsp {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

void write_round_log_csv(std::ostream& os, const AuctionInstance& inst,
                         const std::vector<RoundLog>& logs) {
  os << kRoundLogHeader << "\r\n";
  for (const RoundLog& log : logs) {
    const auto& res = log.result;
    for (std::size_t i = 0; i < log.bids.size(); ++i) {
      os << log.t << ',' << (i + 1) << ',' << to_string(inst.group(i)) << ','
         << format_real(log.types[i]) << ',' << format_real(log.bids[i]) << ','
         << format_real(log.quality[GroupId::H]) << ','
         << format_real(log.quality[GroupId::L]) << ','
         << (res.gsp_outcome.assignment.slot_of(i) + 1) << ','
         << (res.fair_outcome.assignment.slot_of(i) + 1) << ','
         << format_real(res.gsp_outcome.payments[i]) << ','
         << format_real(res.fair_outcome.payments[i]) << ','
         << format_real(res.compensation[i]) << ',' << format_real(log.utilities[i])
         << "\r\n";
    }
  }
}

namespace {

double parse_real(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse,
                "line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
}

std::size_t parse_count(const std::string& s, std::size_t line) {
  double x = parse_real(s, line);
  if (x < 1.0 || x != std::floor(x)) {
    throw Error(ErrorCode::kParse,
                "line " + std::to_string(line) + ": expected a positive integer, got '" + s + "'");
  }
  return static_cast<std::size_t>(x);
}

}  // namespace

std::vector<RoundLog> read_round_log_csv(std::istream& is, const AuctionInstance& inst) {
  const std::size_t n = inst.n_bidders();
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::kParse, "round log is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRoundLogHeader) throw Error(ErrorCode::kParse, "unexpected round log header");

  struct Partial {
    RoundLog log;
    std::vector<std::size_t> gsp_slot;
    std::vector<std::size_t> final_slot;
    std::vector<bool> seen;
  };
  std::map<std::size_t, Partial> rounds;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_record(line);
    if (f.size() != 13) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) + ": expected 13 fields");
    }
    const std::size_t t = parse_count(f[0], lineno);
    const std::size_t i = parse_count(f[1], lineno) - 1;
    if (i >= n) throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) + ": bidder out of range");
    Partial& p = rounds[t];
    if (p.seen.empty()) {
      p.log.t = t;
      p.log.types.values.assign(n, 0.0);
      p.log.bids.bids.assign(n, 0.0);
      p.log.type_index.assign(n, 0);
      p.log.bid_index.assign(n, 0);
      p.log.utilities.assign(n, 0.0);
      p.log.result.gsp_outcome.payments.assign(n, 0.0);
      p.log.result.fair_outcome.payments.assign(n, 0.0);
      p.log.result.compensation.assign(n, 0.0);
      p.gsp_slot.assign(n, 0);
      p.final_slot.assign(n, 0);
      p.seen.assign(n, false);
    }
    if (p.seen[i]) throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) + ": duplicate row");
    p.seen[i] = true;
    RoundLog& log = p.log;
    log.types.values[i] = parse_real(f[3], lineno);
    log.bids.bids[i] = parse_real(f[4], lineno);
    log.quality[GroupId::H] = parse_real(f[5], lineno);
    log.quality[GroupId::L] = parse_real(f[6], lineno);
    p.gsp_slot[i] = parse_count(f[7], lineno) - 1;
    p.final_slot[i] = parse_count(f[8], lineno) - 1;
    log.result.gsp_outcome.payments[i] = parse_real(f[9], lineno);
    log.result.fair_outcome.payments[i] = parse_real(f[10], lineno);
    log.result.compensation[i] = parse_real(f[11], lineno);
    log.utilities[i] = parse_real(f[12], lineno);
    auto ti = grid_index(inst.type_grid.at(i), log.types.values[i]);
    auto bi = grid_index(inst.bid_grid.at(i), log.bids.bids[i]);
    if (ti < 0 || bi < 0) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) + ": value off the grid");
    }
    log.type_index[i] = static_cast<std::size_t>(ti);
    log.bid_index[i] = static_cast<std::size_t>(bi);
  }

  std::vector<RoundLog> out;
  out.reserve(rounds.size());
  for (auto& [t, p] : rounds) {
    for (bool s : p.seen) {
      if (!s) throw Error(ErrorCode::kParse, "round " + std::to_string(t) + " is missing bidders");
    }
    auto invert = [&](const std::vector<std::size_t>& slot_of) {
      std::vector<std::size_t> at(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        if (slot_of[i] >= n) throw Error(ErrorCode::kParse, "slot out of range");
        at[slot_of[i]] = i;
      }
      try {
        return Assignment(std::move(at));
      } catch (const Error&) {
        throw Error(ErrorCode::kParse, "round " + std::to_string(t) + " slots are not a matching");
      }
    };
    p.log.result.gsp_outcome.assignment = invert(p.gsp_slot);
    p.log.result.fair_outcome.assignment = invert(p.final_slot);
    out.push_back(std::move(p.log));
  }
  return out;
}

nlohmann::json to_json(const GroupValues& v) {
  return {{"total", v.total}, {"h", v.by_group[GroupId::H]}, {"l", v.by_group[GroupId::L]}};
}

namespace {

nlohmann::json optional_json(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const RunMetrics& m) {
  nlohmann::json j;
  j["rounds"] = m.rounds;
  j["mechanism"] = m.mechanism;
  j["sw_truthful_gsp"] = to_json(m.sw_truthful_gsp);
  j["sw_equilibrium"] = to_json(m.sw_equilibrium);
  j["sw_gsp_same_bids"] = to_json(m.sw_gsp_same_bids);
  j["gsp_payments_mean"] = m.gsp_payments_mean;
  j["compensation_mean"] = m.compensation_mean;
  j["budget_balance"] = m.budget_balance;
  auto& series = j["budget_balance_series"] = nlohmann::json::array();
  for (const auto& [t, f] : m.budget_balance_series) series.push_back({{"t", t}, {"fraction", f}});
  j["poc"] = optional_json(m.poc);
  j["reward_scale"] = m.reward_scale;
  auto& curve = j["regret_curve"] = nlohmann::json::array();
  for (const auto& cp : m.regret_curve) curve.push_back({{"t", cp.t}, {"regret", cp.regret}});
  auto& gaps = j["bcce_gap"] = nlohmann::json::array();
  for (const auto& row : m.bcce_gap) {
    auto r = nlohmann::json::array();
    for (const auto& g : row) r.push_back(optional_json(g));
    gaps.push_back(std::move(r));
  }
  j["max_bcce_gap"] = optional_json(m.max_bcce_gap);
  j["max_relative_bcce_gap"] = optional_json(m.max_relative_bcce_gap);
  return j;
}

}  // namespace fairgsp
