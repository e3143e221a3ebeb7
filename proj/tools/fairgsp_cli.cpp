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

// fairgsp: run fairness-constrained sponsored-search experiments.
//
//   fairgsp --config exp.json [--seed N] [--out DIR] [--mechanism M]
//           [--threads N] [--dry-run]
//
// Exit status: 0 success, 1 invalid input, 2 runtime failure.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairgsp/fairgsp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

int exit_code_for(int status) {
  switch (status) {
    case FG_OK:
      return kExitOk;
    case FG_ERR_INVALID_ARGUMENT:
    case FG_ERR_VALIDATION:
    case FG_ERR_PARSE:
    case FG_ERR_NOT_FOUND:
      return kExitInvalid;
    default:
      return kExitRuntime;
  }
}

int report(int status) {
  std::fprintf(stderr, "fairgsp: error: %s\n", fg_last_error());
  return exit_code_for(status);
}

struct ConfigDeleter {
  void operator()(fg_config* c) const { fg_config_destroy(c); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness-constrained GSP experiments with no-regret bidders"};
  app.set_version_flag("--version", std::string(fg_version()));

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string mechanism;
  std::size_t threads = 0;
  bool dry_run = false;

  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  auto* seed_opt = app.add_option("--seed", seed, "master seed, overrides the config");
  auto* out_opt = app.add_option("--out", out_dir, "output directory, overrides the config");
  auto* mech_opt = app.add_option("--mechanism", mechanism, "mechanism, overrides the config")
                       ->check(CLI::IsMember({"gsp", "beta-fair", "gsp-efx"}));
  auto* threads_opt =
      app.add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app.add_flag("--dry-run", dry_run, "validate, print the normalized config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  fg_config* raw = nullptr;
  if (int st = fg_config_load(config_path.c_str(), &raw); st != FG_OK) return report(st);
  std::unique_ptr<fg_config, ConfigDeleter> cfg(raw);

  if (*seed_opt) {
    if (int st = fg_config_set_seed(cfg.get(), seed); st != FG_OK) return report(st);
  }
  if (*out_opt) {
    if (int st = fg_config_set_output(cfg.get(), out_dir.c_str()); st != FG_OK) return report(st);
  }
  if (*mech_opt) {
    if (int st = fg_config_set_mechanism(cfg.get(), mechanism.c_str()); st != FG_OK) {
      return report(st);
    }
  }
  if (*threads_opt) {
    if (int st = fg_config_set_threads(cfg.get(), threads); st != FG_OK) return report(st);
  }
  if (int st = fg_config_validate(cfg.get()); st != FG_OK) return report(st);

  if (dry_run) {
    std::size_t needed = 0;
    fg_config_normalized(cfg.get(), nullptr, 0, &needed);
    std::vector<char> buf(needed);
    if (int st = fg_config_normalized(cfg.get(), buf.data(), buf.size(), &needed); st != FG_OK) {
      return report(st);
    }
    std::printf("%s\n", buf.data());
    return kExitOk;
  }

  std::size_t runs = 0;
  if (int st = fg_experiment_run(cfg.get(), &runs); st != FG_OK) return report(st);
  std::fprintf(stderr, "fairgsp: %zu runs written\n", runs);
  return kExitOk;
}
