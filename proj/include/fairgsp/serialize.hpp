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

#ifndef FAIRGSP_SERIALIZE_HPP_
#define FAIRGSP_SERIALIZE_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "fairgsp/simulation.hpp"
#include "json.hpp"

namespace fairgsp {

// Round logs as CSV, one row per (round, bidder), header first:
//
//   t,bidder,group,type,bid,gamma_h,gamma_l,slot_gsp,slot_final,
//   payment_gsp,payment_final,compensation,utility
//
// `t`, `bidder` and the slot columns are 1-based. Reals are written with 17
// significant digits so a read-back reproduces every double exactly.
inline constexpr const char* kRoundLogHeader =
    "t,bidder,group,type,bid,gamma_h,gamma_l,slot_gsp,slot_final,"
    "payment_gsp,payment_final,compensation,utility";

void write_round_log_csv(std::ostream& os, const AuctionInstance& inst,
                         const std::vector<RoundLog>& logs);

// Parses the format above. Value fields are filled from the file; grid
// indices are recovered from the instance grids. Throws Error(kParse).
std::vector<RoundLog> read_round_log_csv(std::istream& is, const AuctionInstance& inst);

nlohmann::json to_json(const GroupValues& v);
nlohmann::json to_json(const RunMetrics& m);

// Splits one RFC-4180 record (no embedded newlines) into fields.
std::vector<std::string> split_csv_record(const std::string& line);

// Round-trip decimal rendering (17 significant digits).
std::string format_real(double x);

}  // namespace fairgsp

#endif  // FAIRGSP_SERIALIZE_HPP_
