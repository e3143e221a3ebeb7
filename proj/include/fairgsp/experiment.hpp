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

#ifndef FAIRGSP_EXPERIMENT_HPP_
#define FAIRGSP_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairgsp/model.hpp"
#include "fairgsp/simulation.hpp"
#include "json.hpp"

namespace fairgsp {

// A value distribution for one group, resolved onto the type grid.
struct ValueDistSpec {
  std::string kind = "point_mass";  // point_mass | uniform | skewed | table | file
  double point = 1.0;
  double rate = 4.0;  // skewed: p(v) proportional to exp(-rate * v / max v)
  std::string file;
  std::vector<std::pair<double, double>> table;  // (value, probability)
};

struct ExperimentConfig {
  std::size_t n_bidders = 20;
  std::size_t n_h = 10;  // bidders 1..n_h form group h
  std::vector<double> type_grid;
  std::vector<double> bid_grid;
  std::string ctr_file;
  PerGroup<std::vector<double>> ctr;
  PerGroup<ValueDistSpec> values;
  std::vector<QualityDraw> quality{QualityDraw{}};

  MechanismTag mechanism = MechanismTag::kBetaFairGsp;
  int xi_l = 1;
  std::vector<int> xi_h{1, 2, 3, 4, 5, 6, 7, 8};

  std::size_t rounds = 10000;
  std::size_t repetitions = 20;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::string output = "out";
  std::optional<double> learning_rate;
  bool track_regret = false;
  std::vector<std::size_t> checkpoints{100, 1000, 10000};
};

// Parses and validates a JSON config. Relative file references resolve
// against `base_dir`. Throws Error(kParse | kNotFound | kValidation); messages
// start with the offending field path.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

// Re-checks invariants after programmatic edits (CLI overrides).
void validate_config(const ExperimentConfig& cfg);

// Every field with defaults filled in; parse_config(normalized(c)) == c.
nlohmann::json normalized(const ExperimentConfig& cfg);

// CSV with header slot,group,ctr. Curves are divided by their per-group
// maximum, must be nonincreasing in slot, and the shorter one is padded
// with zeros.
PerGroup<std::vector<double>> load_discount_curves(const std::filesystem::path& path);

// CSV with header value,probability. Probabilities within 1% of summing to
// one are renormalized; anything else is rejected.
std::vector<std::pair<double, double>> load_value_distribution(const std::filesystem::path& path);

// Market and distributions for a config. Slots and bidders are equalized:
// missing slots get CTR 0, missing bidders become group-h dummies of type 0.
AuctionInstance build_instance(const ExperimentConfig& cfg);
Distributions build_distributions(const ExperimentConfig& cfg, const AuctionInstance& inst);

struct RunSpec {
  std::size_t k = 0;  // 1-based, names run_<k>.json
  MechanismTag mechanism = MechanismTag::kGsp;
  std::optional<int> xi_h;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
};

// Baseline GSP runs first (one per repetition), then (xi_h, repetition)
// pairs. Runs sharing a repetition share a seed and hence the type draws.
std::vector<RunSpec> plan_runs(const ExperimentConfig& cfg);

struct SummaryRow {
  std::string mechanism;
  std::optional<int> xi_h;
  int xi_l = 1;
  std::size_t repetitions = 0;
  // mean and sample standard deviation
  struct Stat {
    double mean = 0.0;
    double std = 0.0;
  };
  Stat sw_gsp, sw_gsp_h, sw_gsp_l;
  Stat sw_c, sw_c_h, sw_c_l;
  Stat sw_opt, sw_opt_h, sw_opt_l;
  Stat budget_balance;
  Stat poc;
};

inline constexpr const char* kSummaryHeader =
    "mechanism,xi_h,xi_l,beta,repetitions,"
    "sw_gsp_mean,sw_gsp_std,sw_gsp_h_mean,sw_gsp_h_std,sw_gsp_l_mean,sw_gsp_l_std,"
    "sw_c_mean,sw_c_std,sw_c_h_mean,sw_c_h_std,sw_c_l_mean,sw_c_l_std,"
    "sw_opt_mean,sw_opt_std,sw_opt_h_mean,sw_opt_h_std,sw_opt_l_mean,sw_opt_l_std,"
    "budget_balance_mean,budget_balance_std,poc_mean,poc_std";

struct ExperimentResult {
  std::vector<RunSpec> runs;
  std::vector<RunMetrics> metrics;  // parallel to runs
  std::vector<SummaryRow> summary;
  std::vector<std::filesystem::path> files;
};

std::vector<SummaryRow> summarize(const ExperimentConfig& cfg, const std::vector<RunSpec>& runs,
                                  const std::vector<RunMetrics>& metrics);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

// Runs every planned dynamic on a worker pool and writes summary.csv,
// run_<k>.json and manifest.json into cfg.output. On failure, files this
// call created are removed before the error propagates.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace fairgsp

#endif  // FAIRGSP_EXPERIMENT_HPP_
