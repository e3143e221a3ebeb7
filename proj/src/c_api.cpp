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

#include "fairgsp/fairgsp.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "fairgsp/composite.hpp"
#include "fairgsp/error.hpp"
#include "fairgsp/experiment.hpp"
#include "fairgsp/simulation.hpp"
#include "fairgsp/version.hpp"

struct fg_config {
  fairgsp::ExperimentConfig cfg;
};

struct fg_instance {
  fairgsp::AuctionInstance inst;
};

namespace {

thread_local std::string g_last_error;

int status_of(fairgsp::ErrorCode code) {
  using fairgsp::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return FG_ERR_INVALID_ARGUMENT;
    case ErrorCode::kOutOfRange: return FG_ERR_OUT_OF_RANGE;
    case ErrorCode::kDegenerateInstance: return FG_ERR_DEGENERATE;
    case ErrorCode::kValidation: return FG_ERR_VALIDATION;
    case ErrorCode::kParse: return FG_ERR_PARSE;
    case ErrorCode::kNotFound: return FG_ERR_NOT_FOUND;
    case ErrorCode::kIo: return FG_ERR_IO;
    case ErrorCode::kRuntime: return FG_ERR_RUNTIME;
  }
  return FG_ERR_RUNTIME;
}

int set_error(int status, std::string msg) {
  g_last_error = std::move(msg);
  return status;
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return FG_OK;
  } catch (const fairgsp::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FG_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FG_ERR_RUNTIME, e.what());
  } catch (...) {
    return set_error(FG_ERR_RUNTIME, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw fairgsp::Error(fairgsp::ErrorCode::kInvalidArgument, what);
}

fairgsp::MechanismTag parse_tag(const char* name) {
  require(name != nullptr, "mechanism is null");
  std::string s(name);
  if (s == "gsp") return fairgsp::MechanismTag::kGsp;
  if (s == "beta-fair") return fairgsp::MechanismTag::kBetaFairGsp;
  if (s == "gsp-efx") return fairgsp::MechanismTag::kGspEfx;
  throw fairgsp::Error(fairgsp::ErrorCode::kInvalidArgument,
                       "unknown mechanism '" + s + "' (expected gsp, beta-fair or gsp-efx)");
}

fairgsp::MechanismSpec make_scheme(const char* name, int xi_h, int xi_l) {
  switch (parse_tag(name)) {
    case fairgsp::MechanismTag::kGsp: return fairgsp::PlainGsp{};
    case fairgsp::MechanismTag::kBetaFairGsp: return fairgsp::BetaFairGsp{fairgsp::Beta(xi_h, xi_l)};
    case fairgsp::MechanismTag::kGspEfx: return fairgsp::GspEfx{fairgsp::Beta(xi_h, xi_l).value()};
  }
  return fairgsp::PlainGsp{};
}

fairgsp::CompositeResult run(const fg_instance* inst, const char* mechanism, int xi_h, int xi_l,
                             const double* bids) {
  require(inst != nullptr && bids != nullptr, "null argument");
  fairgsp::BidProfile b;
  b.bids.assign(bids, bids + inst->inst.n_bidders());
  return fairgsp::compose(inst->inst, b, make_scheme(mechanism, xi_h, xi_l));
}

}  // namespace

extern "C" {

const char* fg_version(void) { return FAIRGSP_VERSION_STRING; }

const char* fg_last_error(void) { return g_last_error.c_str(); }

int fg_config_load(const char* path, fg_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    auto* c = new fg_config{fairgsp::load_config(path)};
    *out = c;
  });
}

int fg_config_parse(const char* json_text, const char* base_dir, fg_config** out) {
  return guarded([&] {
    require(json_text != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw fairgsp::Error(fairgsp::ErrorCode::kParse, e.what());
    }
    auto* c = new fg_config{fairgsp::parse_config(doc, base_dir ? base_dir : ".")};
    *out = c;
  });
}

void fg_config_destroy(fg_config* cfg) { delete cfg; }

int fg_config_set_seed(fg_config* cfg, uint64_t seed) {
  return guarded([&] {
    require(cfg != nullptr, "null config");
    cfg->cfg.seed = seed;
  });
}

int fg_config_set_output(fg_config* cfg, const char* dir) {
  return guarded([&] {
    require(cfg != nullptr && dir != nullptr, "null argument");
    require(*dir != '\0', "output directory is empty");
    cfg->cfg.output = dir;
  });
}

int fg_config_set_mechanism(fg_config* cfg, const char* mechanism) {
  return guarded([&] {
    require(cfg != nullptr, "null config");
    cfg->cfg.mechanism = parse_tag(mechanism);
  });
}

int fg_config_set_threads(fg_config* cfg, size_t threads) {
  return guarded([&] {
    require(cfg != nullptr, "null config");
    cfg->cfg.threads = threads;
  });
}

int fg_config_validate(const fg_config* cfg) {
  return guarded([&] {
    require(cfg != nullptr, "null config");
    fairgsp::validate_config(cfg->cfg);
    auto inst = fairgsp::build_instance(cfg->cfg);
    fairgsp::build_distributions(cfg->cfg, inst);
  });
}

int fg_config_normalized(const fg_config* cfg, char* buf, size_t cap, size_t* needed) {
  std::string text;
  int rc = guarded([&] {
    require(cfg != nullptr, "null config");
    require(buf != nullptr || cap == 0, "null buffer with nonzero capacity");
    text = fairgsp::normalized(cfg->cfg).dump(2);
  });
  if (rc != FG_OK) return rc;
  if (needed) *needed = text.size() + 1;
  if (cap < text.size() + 1) {
    if (cap > 0) buf[0] = '\0';
    return set_error(FG_ERR_BUFFER_TOO_SMALL, "buffer too small");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return FG_OK;
}

int fg_experiment_run(const fg_config* cfg, size_t* runs_written) {
  return guarded([&] {
    require(cfg != nullptr, "null config");
    auto res = fairgsp::run_experiment(cfg->cfg);
    if (runs_written) *runs_written = res.runs.size();
  });
}

int fg_instance_create(size_t n, const int* groups, const double* ctr_h, const double* ctr_l,
                       double gamma_h, double gamma_l, const double* grid, size_t grid_len,
                       fg_instance** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = nullptr;
    require(n > 0, "need at least one bidder");
    require(groups && ctr_h && ctr_l && grid && grid_len > 0, "null argument");
    fairgsp::AuctionInstance inst;
    for (size_t i = 0; i < n; ++i) {
      require(groups[i] == 0 || groups[i] == 1, "group must be 0 (h) or 1 (l)");
      inst.group_of.push_back(groups[i] == 0 ? fairgsp::GroupId::H : fairgsp::GroupId::L);
    }
    inst.ctr[fairgsp::GroupId::H].assign(ctr_h, ctr_h + n);
    inst.ctr[fairgsp::GroupId::L].assign(ctr_l, ctr_l + n);
    inst.quality[fairgsp::GroupId::H] = gamma_h;
    inst.quality[fairgsp::GroupId::L] = gamma_l;
    std::vector<double> g(grid, grid + grid_len);
    inst.type_grid.assign(n, g);
    inst.bid_grid.assign(n, g);
    fairgsp::require_valid(inst);
    *out = new fg_instance{std::move(inst)};
  });
}

void fg_instance_destroy(fg_instance* inst) { delete inst; }

size_t fg_instance_size(const fg_instance* inst) { return inst ? inst->inst.n_bidders() : 0; }

int fg_run_mechanism(const fg_instance* inst, const char* mechanism, int xi_h, int xi_l,
                     const double* bids, size_t* slot_of, double* payments, double* compensation) {
  return guarded([&] {
    require(slot_of != nullptr && payments != nullptr, "null output array");
    auto res = run(inst, mechanism, xi_h, xi_l, bids);
    for (size_t i = 0; i < inst->inst.n_bidders(); ++i) {
      slot_of[i] = res.fair_outcome.assignment.slot_of(i);
      payments[i] = res.fair_outcome.payments[i];
      if (compensation) compensation[i] = res.compensation[i];
    }
  });
}

int fg_utilities(const fg_instance* inst, const char* mechanism, int xi_h, int xi_l,
                 const double* bids, const double* values, double* utilities) {
  return guarded([&] {
    require(values != nullptr && utilities != nullptr, "null argument");
    auto res = run(inst, mechanism, xi_h, xi_l, bids);
    fairgsp::ValuationProfile v;
    v.values.assign(values, values + inst->inst.n_bidders());
    auto u = fairgsp::round_utilities(inst->inst, res, v);
    std::copy(u.begin(), u.end(), utilities);
  });
}

}  // extern "C"
