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

#include "fairgsp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fairgsp/bandit.hpp"
#include "fairgsp/composite.hpp"
#include "fairgsp/error.hpp"
#include "fairgsp/serialize.hpp"
#include "fairgsp/version.hpp"

namespace fairgsp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kRepetitionStream = 0x5EEDULL;

[[noreturn]] void fail(const std::string& path, const std::string& what,
                       ErrorCode code = ErrorCode::kValidation) {
  throw Error(code, path + ": " + what);
}

std::vector<double> default_grid(std::size_t steps, double max) {
  std::vector<double> g(steps + 1);
  for (std::size_t x = 0; x <= steps; ++x) g[x] = max * static_cast<double>(x) / steps;
  return g;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  fail(path, "expected a nonnegative integer");
}

int small_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  auto x = j.get<std::int64_t>();
  if (x < -1000000 || x > 1000000) fail(path, "integer out of range");
  return static_cast<int>(x);
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) fail(path + "." + key, "unknown key");
  }
}

std::vector<double> parse_grid(const json& j, const std::string& path) {
  if (j.is_array()) return number_list(j, path);
  if (!j.is_object()) fail(path, "expected an array or {\"steps\", \"max\"}");
  reject_unknown(j, path, {"steps", "max"});
  std::size_t steps = j.contains("steps") ? unsigned_integer(j["steps"], path + ".steps") : 100;
  double max = j.contains("max") ? number(j["max"], path + ".max") : 1.0;
  if (steps == 0) fail(path + ".steps", "must be positive");
  if (steps > 100000) fail(path + ".steps", "too many grid points");
  return default_grid(steps, max);
}

void check_grid(const std::vector<double>& g, const std::string& path) {
  if (g.empty()) fail(path, "grid is empty");
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!std::isfinite(g[k]) || g[k] < 0.0) fail(path, "grid entries must be finite and >= 0");
    if (k > 0 && !(g[k] > g[k - 1])) fail(path, "grid must be strictly ascending");
  }
}

fs::path resolve(const fs::path& base, const std::string& file, const std::string& path) {
  fs::path p = fs::path(file).is_absolute() ? fs::path(file) : base / file;
  p = fs::absolute(p).lexically_normal();
  if (!fs::is_regular_file(p)) fail(path, "no such file: " + p.string(), ErrorCode::kNotFound);
  return p;
}

ValueDistSpec parse_values(const json& j, const std::string& path, const fs::path& base) {
  if (!j.is_object() || j.size() != 1) {
    fail(path, "expected exactly one of point_mass, uniform, skewed, table, file");
  }
  ValueDistSpec d;
  const auto& [key, val] = *j.items().begin();
  d.kind = key;
  if (key == "point_mass") {
    d.point = number(val, path + ".point_mass");
  } else if (key == "uniform") {
    if (!val.is_boolean() || !val.get<bool>()) fail(path + ".uniform", "expected true");
  } else if (key == "skewed") {
    d.rate = number(val, path + ".skewed");
    if (!(d.rate >= 0.0)) fail(path + ".skewed", "rate must be >= 0");
  } else if (key == "table") {
    if (!val.is_array()) fail(path + ".table", "expected [[value, probability], ...]");
    for (std::size_t k = 0; k < val.size(); ++k) {
      const std::string p = path + ".table[" + std::to_string(k) + "]";
      if (!val[k].is_array() || val[k].size() != 2) fail(p, "expected [value, probability]");
      d.table.emplace_back(number(val[k][0], p + "[0]"), number(val[k][1], p + "[1]"));
    }
  } else if (key == "file") {
    if (!val.is_string()) fail(path + ".file", "expected a path");
    fs::path p = resolve(base, val.get<std::string>(), path + ".file");
    d.file = p.string();
    try {
      d.table = load_value_distribution(p);
    } catch (const Error& e) {
      fail(path + ".file", e.what(), e.code());
    }
  } else {
    fail(path + "." + key, "unknown distribution kind");
  }
  return d;
}

json values_json(const ValueDistSpec& d) {
  if (d.kind == "point_mass") return {{"point_mass", d.point}};
  if (d.kind == "uniform") return {{"uniform", true}};
  if (d.kind == "skewed") return {{"skewed", d.rate}};
  if (d.kind == "file") return {{"file", d.file}};
  json t = json::array();
  for (const auto& [v, p] : d.table) t.push_back({v, p});
  return {{"table", t}};
}

// Probabilities over `grid` for one group.
std::vector<double> resolve_values(const ValueDistSpec& d, const std::vector<double>& grid,
                                   const std::string& path) {
  std::vector<double> p(grid.size(), 0.0);
  if (d.kind == "point_mass") {
    auto k = grid_index(grid, d.point);
    if (k < 0) fail(path + ".point_mass", "value is not on the type grid");
    p[static_cast<std::size_t>(k)] = 1.0;
  } else if (d.kind == "uniform") {
    std::fill(p.begin(), p.end(), 1.0 / grid.size());
  } else if (d.kind == "skewed") {
    const double top = grid.back() > 0.0 ? grid.back() : 1.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) sum += p[k] = std::exp(-d.rate * grid[k] / top);
    for (double& x : p) x /= sum;
  } else {
    double sum = 0.0;
    for (const auto& [v, q] : d.table) {
      auto k = grid_index(grid, v);
      if (k < 0) fail(path, "value " + format_real(v) + " is not on the type grid");
      if (!(q >= 0.0) || !std::isfinite(q)) fail(path, "probabilities must be finite and >= 0");
      p[static_cast<std::size_t>(k)] += q;
      sum += q;
    }
    if (std::abs(sum - 1.0) > 0.01) fail(path, "probabilities sum to " + format_real(sum));
    for (double& x : p) x /= sum;
  }
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p, const std::vector<std::string>& header) {
  std::istringstream in(read_file(p));
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_record(line);
    if (first) {
      if (f != header) throw Error(ErrorCode::kParse, p.string() + ": unexpected header");
      first = false;
      continue;
    }
    if (f.size() != header.size()) {
      throw Error(ErrorCode::kParse, p.string() + ":" + std::to_string(lineno) + ": expected " +
                                         std::to_string(header.size()) + " fields");
    }
    rows.push_back(std::move(f));
  }
  if (first) throw Error(ErrorCode::kParse, p.string() + ": file is empty");
  return rows;
}

double csv_real(const std::string& s, const fs::path& p) {
  try {
    std::size_t used = 0;
    double x = std::stod(s, &used);
    if (used == s.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kParse, p.string() + ": not a number: '" + s + "'");
}

GroupId parse_group(const std::string& s, const fs::path& p) {
  if (s == "h" || s == "H") return GroupId::H;
  if (s == "l" || s == "L") return GroupId::L;
  throw Error(ErrorCode::kParse, p.string() + ": unknown group '" + s + "'");
}

MechanismTag parse_mechanism(const std::string& s, const std::string& path) {
  if (s == "gsp") return MechanismTag::kGsp;
  if (s == "beta-fair") return MechanismTag::kBetaFairGsp;
  if (s == "gsp-efx") return MechanismTag::kGspEfx;
  fail(path, "expected gsp, beta-fair or gsp-efx");
}

void check_ctr(const std::vector<double>& c, const std::string& path) {
  if (c.empty()) fail(path, "curve is empty");
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (!(c[j] >= 0.0 && c[j] <= 1.0)) fail(path, "entries must lie in [0, 1]");
    if (j > 0 && c[j] > c[j - 1]) fail(path, "curve is not nonincreasing");
  }
}

void pad_curves(PerGroup<std::vector<double>>& ctr) {
  const std::size_t m = std::max(ctr[GroupId::H].size(), ctr[GroupId::L].size());
  for (GroupId g : kGroups) ctr[g].resize(m, 0.0);
}

}  // namespace

PerGroup<std::vector<double>> load_discount_curves(const fs::path& path) {
  auto rows = read_csv(path, {"slot", "group", "ctr"});
  PerGroup<std::map<long long, double>> raw;
  for (const auto& r : rows) {
    double slot = csv_real(r[0], path);
    if (slot < 1.0 || slot != std::floor(slot)) {
      throw Error(ErrorCode::kParse, path.string() + ": slot must be a positive integer");
    }
    GroupId g = parse_group(r[1], path);
    double c = csv_real(r[2], path);
    if (c < 0.0) throw Error(ErrorCode::kValidation, path.string() + ": negative ctr");
    if (!raw[g].emplace(static_cast<long long>(slot), c).second) {
      throw Error(ErrorCode::kValidation, path.string() + ": duplicate entry for slot " + r[0] +
                                              ", group " + std::string(to_string(g)));
    }
  }
  PerGroup<std::vector<double>> out;
  for (GroupId g : kGroups) {
    if (raw[g].empty()) {
      throw Error(ErrorCode::kValidation,
                  path.string() + ": no entries for group " + std::string(to_string(g)));
    }
    double top = 0.0;
    for (const auto& [_, c] : raw[g]) top = std::max(top, c);
    if (!(top > 0.0)) {
      throw Error(ErrorCode::kValidation,
                  path.string() + ": group " + std::string(to_string(g)) + " curve is all zero");
    }
    for (const auto& [_, c] : raw[g]) {
      if (!out[g].empty() && c / top > out[g].back()) {
        throw Error(ErrorCode::kValidation, path.string() + ": group " +
                                                std::string(to_string(g)) +
                                                " curve is not nonincreasing in slot");
      }
      out[g].push_back(c / top);
    }
  }
  pad_curves(out);
  return out;
}

std::vector<std::pair<double, double>> load_value_distribution(const fs::path& path) {
  auto rows = read_csv(path, {"value", "probability"});
  std::vector<std::pair<double, double>> out;
  double sum = 0.0;
  for (const auto& r : rows) {
    double v = csv_real(r[0], path);
    double p = csv_real(r[1], path);
    if (v < 0.0 || p < 0.0) {
      throw Error(ErrorCode::kValidation, path.string() + ": values and probabilities must be >= 0");
    }
    out.emplace_back(v, p);
    sum += p;
  }
  if (out.empty()) throw Error(ErrorCode::kValidation, path.string() + ": no rows");
  if (std::abs(sum - 1.0) > 0.01) {
    throw Error(ErrorCode::kValidation,
                path.string() + ": probabilities sum to " + format_real(sum) + ", not 1");
  }
  for (auto& [_, p] : out) p /= sum;
  return out;
}

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) fail("$", "config must be a JSON object");
  reject_unknown(doc, "$",
                 {"bidders", "majority", "type_grid", "bid_grid", "ctr", "values", "quality",
                  "mechanism", "xi_l", "xi_h", "rounds", "repetitions", "seed", "threads",
                  "output", "exp3", "track_regret", "checkpoints"});
  ExperimentConfig c;
  if (doc.contains("bidders")) c.n_bidders = unsigned_integer(doc["bidders"], "$.bidders");
  c.n_h = doc.contains("majority") ? unsigned_integer(doc["majority"], "$.majority")
                                   : c.n_bidders / 2;
  c.type_grid = doc.contains("type_grid") ? parse_grid(doc["type_grid"], "$.type_grid")
                                          : default_grid(100, 1.0);
  c.bid_grid =
      doc.contains("bid_grid") ? parse_grid(doc["bid_grid"], "$.bid_grid") : c.type_grid;

  if (doc.contains("ctr")) {
    const json& j = doc["ctr"];
    if (!j.is_object()) fail("$.ctr", "expected an object");
    if (j.contains("file")) {
      reject_unknown(j, "$.ctr", {"file"});
      if (!j["file"].is_string()) fail("$.ctr.file", "expected a path");
      fs::path p = resolve(base_dir, j["file"].get<std::string>(), "$.ctr.file");
      c.ctr_file = p.string();
      try {
        c.ctr = load_discount_curves(p);
      } catch (const Error& e) {
        fail("$.ctr.file", e.what(), e.code());
      }
    } else {
      reject_unknown(j, "$.ctr", {"h", "l"});
      if (!j.contains("h") || !j.contains("l")) fail("$.ctr", "needs both h and l, or file");
      c.ctr[GroupId::H] = number_list(j["h"], "$.ctr.h");
      c.ctr[GroupId::L] = number_list(j["l"], "$.ctr.l");
    }
  }
  if (doc.contains("values")) {
    const json& j = doc["values"];
    if (!j.is_object()) fail("$.values", "expected an object");
    reject_unknown(j, "$.values", {"h", "l"});
    if (j.contains("h")) c.values[GroupId::H] = parse_values(j["h"], "$.values.h", base_dir);
    if (j.contains("l")) c.values[GroupId::L] = parse_values(j["l"], "$.values.l", base_dir);
  }
  if (!doc.contains("values") || !doc["values"].contains("l")) {
    c.values[GroupId::L].kind = "skewed";
      }
  if (doc.contains("quality")) {
    const json& j = doc["quality"];
    if (!j.is_array() || j.empty()) fail("$.quality", "expected a nonempty array");
    c.quality.clear();
    for (std::size_t k = 0; k < j.size(); ++k) {
      const std::string p = "$.quality[" + std::to_string(k) + "]";
      if (!j[k].is_object()) fail(p, "expected {gamma_h, gamma_l, probability}");
      reject_unknown(j[k], p, {"gamma_h", "gamma_l", "probability"});
      QualityDraw q;
      if (j[k].contains("gamma_h")) q.gamma[GroupId::H] = number(j[k]["gamma_h"], p + ".gamma_h");
      if (j[k].contains("gamma_l")) q.gamma[GroupId::L] = number(j[k]["gamma_l"], p + ".gamma_l");
      if (j[k].contains("probability")) q.probability = number(j[k]["probability"], p + ".probability");
      c.quality.push_back(q);
    }
  }
  if (doc.contains("mechanism")) {
    if (!doc["mechanism"].is_string()) fail("$.mechanism", "expected a string");
    c.mechanism = parse_mechanism(doc["mechanism"].get<std::string>(), "$.mechanism");
  }
  if (doc.contains("xi_l")) c.xi_l = small_integer(doc["xi_l"], "$.xi_l");
  if (doc.contains("xi_h")) {
    const json& j = doc["xi_h"];
    if (!j.is_array()) fail("$.xi_h", "expected an array of integers");
    c.xi_h.clear();
    for (std::size_t k = 0; k < j.size(); ++k) {
      c.xi_h.push_back(small_integer(j[k], "$.xi_h[" + std::to_string(k) + "]"));
    }
  }
  if (doc.contains("rounds")) c.rounds = unsigned_integer(doc["rounds"], "$.rounds");
  if (doc.contains("repetitions")) c.repetitions = unsigned_integer(doc["repetitions"], "$.repetitions");
  if (doc.contains("seed")) c.seed = unsigned_integer(doc["seed"], "$.seed");
  if (doc.contains("threads")) c.threads = unsigned_integer(doc["threads"], "$.threads");
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) fail("$.output", "expected a path");
    c.output = doc["output"].get<std::string>();
  }
  if (doc.contains("exp3")) {
    const json& j = doc["exp3"];
    if (!j.is_object()) fail("$.exp3", "expected an object");
    reject_unknown(j, "$.exp3", {"learning_rate"});
    if (j.contains("learning_rate") && !j["learning_rate"].is_null()) {
      c.learning_rate = number(j["learning_rate"], "$.exp3.learning_rate");
    }
  }
  if (doc.contains("track_regret")) {
    if (!doc["track_regret"].is_boolean()) fail("$.track_regret", "expected true or false");
    c.track_regret = doc["track_regret"].get<bool>();
  }
  if (doc.contains("checkpoints")) {
    const json& j = doc["checkpoints"];
    if (!j.is_array()) fail("$.checkpoints", "expected an array of integers");
    c.checkpoints.clear();
    for (std::size_t k = 0; k < j.size(); ++k) {
      c.checkpoints.push_back(unsigned_integer(j[k], "$.checkpoints[" + std::to_string(k) + "]"));
    }
  }
  if (c.ctr[GroupId::H].empty()) {
    const std::size_t m = std::max<std::size_t>(c.n_bidders, 1);
    for (std::size_t j = 1; j <= m; ++j) {
      c.ctr[GroupId::H].push_back(std::pow(0.9, static_cast<double>(j - 1)));
      c.ctr[GroupId::L].push_back(1.0 / static_cast<double>(j));
    }
  }
  validate_config(c);
  return c;
}

void validate_config(const ExperimentConfig& c) {
  if (c.n_bidders < 2) fail("$.bidders", "need at least 2 bidders");
  if (c.n_bidders > 10000) fail("$.bidders", "too many bidders");
  if (c.n_h < 1 || c.n_h >= c.n_bidders) fail("$.majority", "both groups need at least one bidder");
  check_grid(c.type_grid, "$.type_grid");
  check_grid(c.bid_grid, "$.bid_grid");
  if (c.bid_grid.back() < c.type_grid.back()) {
    fail("$.bid_grid", "largest bid must be at least the largest type");
  }
  check_ctr(c.ctr[GroupId::H], "$.ctr.h");
  check_ctr(c.ctr[GroupId::L], "$.ctr.l");
  for (GroupId g : kGroups) {
    const std::string p = g == GroupId::H ? "$.values.h" : "$.values.l";
    resolve_values(c.values[g], c.type_grid, p);
  }
  double total_q = 0.0;
  for (std::size_t k = 0; k < c.quality.size(); ++k) {
    const std::string p = "$.quality[" + std::to_string(k) + "]";
    for (GroupId g : kGroups) {
      double x = c.quality[k].gamma[g];
      if (!(x > 0.0 && x <= 1.0)) fail(p, "quality factors must lie in (0, 1]");
    }
    if (!(c.quality[k].probability >= 0.0)) fail(p + ".probability", "must be >= 0");
    total_q += c.quality[k].probability;
  }
  if (std::abs(total_q - 1.0) > 1e-9) fail("$.quality", "probabilities must sum to 1");
  if (c.xi_l < 1) fail("$.xi_l", "must be >= 1");
  if (c.mechanism != MechanismTag::kGsp) {
    if (c.xi_h.empty()) fail("$.xi_h", "sweep is empty");
    for (std::size_t k = 0; k < c.xi_h.size(); ++k) {
      if (c.xi_h[k] < c.xi_l) {
        fail("$.xi_h[" + std::to_string(k) + "]", "must be >= xi_l (" + std::to_string(c.xi_l) + ")");
      }
    }
  }
  if (c.rounds < 1) fail("$.rounds", "must be >= 1");
  if (c.repetitions < 1) fail("$.repetitions", "must be >= 1");
  if (c.threads > 4096) fail("$.threads", "too many threads");
  if (c.output.empty()) fail("$.output", "must not be empty");
  if (c.learning_rate && !(*c.learning_rate > 0.0 && std::isfinite(*c.learning_rate))) {
    fail("$.exp3.learning_rate", "must be positive");
  }
}

ExperimentConfig load_config(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kNotFound, "config: no such file: " + path.string());
  }
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json normalized(const ExperimentConfig& c) {
  json j;
  j["bidders"] = c.n_bidders;
  j["majority"] = c.n_h;
  j["type_grid"] = c.type_grid;
  j["bid_grid"] = c.bid_grid;
  if (!c.ctr_file.empty()) {
    j["ctr"] = {{"file", c.ctr_file}};
  } else {
    j["ctr"] = {{"h", c.ctr[GroupId::H]}, {"l", c.ctr[GroupId::L]}};
  }
  j["values"] = {{"h", values_json(c.values[GroupId::H])}, {"l", values_json(c.values[GroupId::L])}};
  j["quality"] = json::array();
  for (const auto& q : c.quality) {
    j["quality"].push_back({{"gamma_h", q.gamma[GroupId::H]},
                            {"gamma_l", q.gamma[GroupId::L]},
                            {"probability", q.probability}});
  }
  j["mechanism"] = std::string(to_string(c.mechanism));
  j["xi_l"] = c.xi_l;
  j["xi_h"] = c.xi_h;
  j["rounds"] = c.rounds;
  j["repetitions"] = c.repetitions;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output"] = c.output;
  j["exp3"] = {{"learning_rate", c.learning_rate ? json(*c.learning_rate) : json(nullptr)}};
  j["track_regret"] = c.track_regret;
  j["checkpoints"] = c.checkpoints;
  return j;
}

AuctionInstance build_instance(const ExperimentConfig& cfg) {
  PerGroup<std::vector<double>> ctr = cfg.ctr;
  const std::size_t size = std::max(cfg.n_bidders, ctr[GroupId::H].size());
  for (GroupId g : kGroups) ctr[g].resize(size, 0.0);
  AuctionInstance inst;
  inst.ctr = std::move(ctr);
  for (std::size_t i = 0; i < size; ++i) {
    if (i < cfg.n_bidders) {
      inst.group_of.push_back(i < cfg.n_h ? GroupId::H : GroupId::L);
      inst.type_grid.push_back(cfg.type_grid);
      inst.bid_grid.push_back(cfg.bid_grid);
    } else {
      inst.group_of.push_back(GroupId::H);
      inst.type_grid.push_back({0.0});
      inst.bid_grid.push_back({0.0});
    }
  }
  require_valid(inst);
  return inst;
}

Distributions build_distributions(const ExperimentConfig& cfg, const AuctionInstance& inst) {
  Distributions d;
  PerGroup<std::vector<double>> probs;
  probs[GroupId::H] = resolve_values(cfg.values[GroupId::H], cfg.type_grid, "$.values.h");
  probs[GroupId::L] = resolve_values(cfg.values[GroupId::L], cfg.type_grid, "$.values.l");
  for (std::size_t i = 0; i < inst.n_bidders(); ++i) {
    d.value_probs.push_back(i < cfg.n_bidders ? probs[inst.group(i)] : std::vector<double>{1.0});
  }
  d.quality = cfg.quality;
  auto problems = validate_distributions(inst, d);
  if (!problems.empty()) throw Error(ErrorCode::kValidation, problems.front());
  return d;
}

std::vector<RunSpec> plan_runs(const ExperimentConfig& cfg) {
  std::vector<RunSpec> runs;
  std::size_t k = 0;
  for (std::size_t r = 0; r < cfg.repetitions; ++r) {
    runs.push_back({++k, MechanismTag::kGsp, std::nullopt, r,
                    derive_seed(cfg.seed, kRepetitionStream, r)});
  }
  if (cfg.mechanism == MechanismTag::kGsp) return runs;
  for (int xi : cfg.xi_h) {
    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
      runs.push_back({++k, cfg.mechanism, xi, r, derive_seed(cfg.seed, kRepetitionStream, r)});
    }
  }
  return runs;
}

namespace {

MechanismSpec scheme_for(const RunSpec& run, int xi_l) {
  switch (run.mechanism) {
    case MechanismTag::kGsp:
      return PlainGsp{};
    case MechanismTag::kBetaFairGsp:
      return BetaFairGsp{Beta(*run.xi_h, xi_l)};
    case MechanismTag::kGspEfx:
      return GspEfx{Beta(*run.xi_h, xi_l).value()};
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mechanism");
}

SummaryRow::Stat stat(const std::vector<double>& xs) {
  SummaryRow::Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

struct Columns {
  std::vector<double> g, gh, gl, c, ch, cl, o, oh, ol, bb, poc;

  void add(const RunMetrics& base, const RunMetrics& run, bool composite) {
    g.push_back(base.sw_equilibrium.total);
    gh.push_back(base.sw_equilibrium.by_group[GroupId::H]);
    gl.push_back(base.sw_equilibrium.by_group[GroupId::L]);
    c.push_back(run.sw_equilibrium.total);
    ch.push_back(run.sw_equilibrium.by_group[GroupId::H]);
    cl.push_back(run.sw_equilibrium.by_group[GroupId::L]);
    o.push_back(run.sw_truthful_gsp.total);
    oh.push_back(run.sw_truthful_gsp.by_group[GroupId::H]);
    ol.push_back(run.sw_truthful_gsp.by_group[GroupId::L]);
    bb.push_back(composite ? run.budget_balance : 0.0);
    poc.push_back(run.poc.value_or(std::nan("")));
  }

  void fill(SummaryRow& row) const {
    row.sw_gsp = stat(g);
    row.sw_gsp_h = stat(gh);
    row.sw_gsp_l = stat(gl);
    row.sw_c = stat(c);
    row.sw_c_h = stat(ch);
    row.sw_c_l = stat(cl);
    row.sw_opt = stat(o);
    row.sw_opt_h = stat(oh);
    row.sw_opt_l = stat(ol);
    row.budget_balance = stat(bb);
    row.poc = stat(poc);
    row.repetitions = g.size();
  }
};

}  // namespace

std::vector<SummaryRow> summarize(const ExperimentConfig& cfg, const std::vector<RunSpec>& runs,
                                  const std::vector<RunMetrics>& metrics) {
  if (runs.size() != metrics.size()) {
    throw Error(ErrorCode::kInvalidArgument, "runs and metrics differ in length");
  }
  std::vector<const RunMetrics*> baseline(cfg.repetitions, nullptr);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (runs[k].mechanism == MechanismTag::kGsp) baseline.at(runs[k].repetition) = &metrics[k];
  }
  for (const auto* b : baseline) {
    if (!b) throw Error(ErrorCode::kInvalidArgument, "a repetition lacks its GSP baseline");
  }
  std::vector<SummaryRow> rows;
  if (cfg.mechanism == MechanismTag::kGsp) {
    Columns cols;
    for (const auto* b : baseline) cols.add(*b, *b, false);
    SummaryRow row;
    row.mechanism = "gsp";
    row.xi_l = cfg.xi_l;
    cols.fill(row);
    rows.push_back(row);
    return rows;
  }
  for (int xi : cfg.xi_h) {
    Columns cols;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      if (runs[k].mechanism == MechanismTag::kGsp || runs[k].xi_h != xi) continue;
      cols.add(*baseline[runs[k].repetition], metrics[k], true);
    }
    SummaryRow row;
    row.mechanism = std::string(to_string(cfg.mechanism));
    row.xi_h = xi;
    row.xi_l = cfg.xi_l;
    cols.fill(row);
    rows.push_back(row);
  }
  return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << "\r\n";
  for (const auto& r : rows) {
    os << r.mechanism << ',';
    if (r.xi_h) os << *r.xi_h;
    os << ',' << r.xi_l << ',';
    if (r.xi_h) os << format_real(static_cast<double>(r.xi_l) / *r.xi_h);
    os << ',' << r.repetitions;
    for (const auto* s : {&r.sw_gsp, &r.sw_gsp_h, &r.sw_gsp_l, &r.sw_c, &r.sw_c_h, &r.sw_c_l,
                          &r.sw_opt, &r.sw_opt_h, &r.sw_opt_l, &r.budget_balance, &r.poc}) {
      os << ',' << format_real(s->mean) << ',' << format_real(s->std);
    }
    os << "\r\n";
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

json run_json(const RunSpec& run, const ExperimentConfig& cfg, const RunMetrics& m) {
  json j;
  j["k"] = run.k;
  j["mechanism"] = std::string(to_string(run.mechanism));
  j["xi_h"] = run.xi_h ? json(*run.xi_h) : json(nullptr);
  j["xi_l"] = cfg.xi_l;
  j["beta"] = run.xi_h ? json(static_cast<double>(cfg.xi_l) / *run.xi_h) : json(nullptr);
  j["repetition"] = run.repetition + 1;
  j["seed"] = run.seed;
  j["metrics"] = to_json(m);
  return j;
}

void write_text(const fs::path& p, const std::string& text, std::vector<fs::path>& created) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  created.push_back(p);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + p.string());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const AuctionInstance inst = build_instance(cfg);
  const Distributions dists = build_distributions(cfg, inst);

  ExperimentResult res;
  res.runs = plan_runs(cfg);
  res.metrics.resize(res.runs.size());

  DynamicOptions opts;
  opts.learning_rate = cfg.learning_rate;
  opts.track_regret = cfg.track_regret;
  opts.keep_logs = false;
  opts.checkpoints = cfg.checkpoints;

  std::size_t workers = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, res.runs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= res.runs.size() || failed.load()) return;
      try {
        const RunSpec& run = res.runs[k];
        res.metrics[k] =
            run_dynamic(inst, dists, scheme_for(run, cfg.xi_l), cfg.rounds, run.seed, opts).metrics;
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (error) std::rethrow_exception(error);

  res.summary = summarize(cfg, res.runs, res.metrics);

  const fs::path out_dir(cfg.output);
  std::vector<fs::path> created;
  const bool dir_existed = fs::exists(out_dir);
  try {
    fs::create_directories(out_dir);
    std::ostringstream summary;
    write_summary_csv(summary, res.summary);
    write_text(out_dir / "summary.csv", summary.str(), created);

    json runs = json::array();
    for (std::size_t k = 0; k < res.runs.size(); ++k) {
      const RunSpec& run = res.runs[k];
      const std::string name = "run_" + std::to_string(run.k) + ".json";
      write_text(out_dir / name, run_json(run, cfg, res.metrics[k]).dump(2) + "\n", created);
      runs.push_back({{"k", run.k},
                      {"file", name},
                      {"mechanism", std::string(to_string(run.mechanism))},
                      {"xi_h", run.xi_h ? json(*run.xi_h) : json(nullptr)},
                      {"repetition", run.repetition + 1},
                      {"seed", run.seed}});
    }

    const json config = normalized(cfg);
    json manifest;
    manifest["tool"] = "fairgsp";
    manifest["version"] = FAIRGSP_VERSION_STRING;
    manifest["config_hash"] = "fnv1a64:" + hex64(fnv1a64(config.dump()));
    manifest["master_seed"] = cfg.seed;
    manifest["config"] = config;
    json resolved;
    resolved["ctr"] = {{"h", inst.ctr[GroupId::H]}, {"l", inst.ctr[GroupId::L]}};
    resolved["value_probs"] = {{"h", dists.value_probs.front()},
                               {"l", dists.value_probs.at(cfg.n_h)}};
    manifest["resolved"] = resolved;
    manifest["runs"] = runs;
    json files = json::array({"summary.csv"});
    for (const auto& r : runs) files.push_back(r["file"]);
    files.push_back("manifest.json");
    manifest["files"] = files;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n", created);
  } catch (...) {
    std::error_code ec;
    for (const auto& p : created) fs::remove(p, ec);
    if (!dir_existed) fs::remove(out_dir, ec);
    throw;
  }
  for (const auto& p : created) res.files.push_back(p);
  return res;
}

}  // namespace fairgsp
