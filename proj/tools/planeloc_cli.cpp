// Copyright 2026 The planeloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// planeloc: command-line front end over the C library.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "planeloc/planeloc.h"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> seed;
  std::optional<int> workers;
  std::optional<std::string> lambda;
  std::optional<int> window;
  std::optional<std::string> mode;
  std::vector<std::string> settings;  // raw key=value
};

void AddCommon(CLI::App* cmd, Overrides* o) {
  cmd->add_option("--config", o->config_path, "key = value configuration file");
  cmd->add_option("--seed", o->seed, "random seed");
  cmd->add_option("--workers", o->workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", o->lambda, "reprojection weight in [0, 1]");
  cmd->add_option("--window", o->window, "sliding window capacity")->check(CLI::PositiveNumber);
  cmd->add_option("--mode", o->mode, "ATE mode")->check(CLI::IsMember({"planar", "spatial"}));
  cmd->add_option("--set", o->settings, "extra key=value override (repeatable)");
}

void PrintText(void*, const char* text) { std::fputs(text, stdout); }

int ExitCode(planeloc_status status) {
  if (status == PLANELOC_OK) return 0;
  std::fprintf(stderr, "error: %s\n", planeloc_last_error());
  return status == PLANELOC_ERR_SINGULAR_SYSTEM ? 2 : 1;
}

class Config {
 public:
  Config() {
    if (planeloc_config_create(&handle_) != PLANELOC_OK) handle_ = nullptr;
  }
  ~Config() { planeloc_config_destroy(handle_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  planeloc_config* get() const { return handle_; }

  // Defaults, then the file, then flags.
  planeloc_status Apply(const Overrides& o, const std::optional<std::string>& preset) {
    if (!handle_) return PLANELOC_ERR_INTERNAL;
    planeloc_status s = PLANELOC_OK;
    if (!o.config_path.empty() && (s = planeloc_config_load(handle_, o.config_path.c_str()))) {
      return s;
    }
    std::vector<std::pair<std::string, std::string>> sets;
    if (o.seed) sets.emplace_back("seed", *o.seed);
    if (o.workers) sets.emplace_back("workers", std::to_string(*o.workers));
    if (o.lambda) sets.emplace_back("localize.lambda", *o.lambda);
    if (o.window) sets.emplace_back("window.capacity", std::to_string(*o.window));
    if (o.mode) sets.emplace_back("eval.mode", *o.mode);
    if (preset) sets.emplace_back("sim.preset", *preset);
    for (const std::string& kv : o.settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
        return PLANELOC_ERR_INVALID_CONFIG;
      }
      sets.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : sets) {
      if ((s = planeloc_config_set(handle_, key.c_str(), value.c_str()))) return s;
    }
    return planeloc_config_validate(handle_);
  }

 private:
  planeloc_config* handle_ = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereo localization against a planar prior map"};
  app.require_subcommand(1);
  app.set_version_flag("--version", planeloc_version());
  Overrides o;

  std::string cloud_path, planes_out;
  CLI::App* extract = app.add_subcommand("extract-planes", "Extract planes from a point cloud");
  extract->add_option("cloud", cloud_path, "point cloud file")->required();
  extract->add_option("--out", planes_out, "output plane map file")->required();

  std::string obs_path, planes_path, init_path, traj_out;
  CLI::App* localize = app.add_subcommand("localize", "Localize a stereo sequence");
  localize->add_option("observations", obs_path, "observation CSV")->required();
  localize->add_option("planes", planes_path, "plane map file")->required();
  localize->add_option("initial_pose", init_path, "KITTI file; first line is the start pose")
      ->required();
  localize->add_option("--out", traj_out, "output KITTI trajectory")->required();

  std::optional<std::string> preset;
  std::string sim_out;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic scene");
  simulate->add_option("preset", preset, "corridor, orthogonal3 or turn");
  simulate->add_option("--out", sim_out, "output directory")->required();

  std::string est_path, gt_path, eval_out;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Absolute trajectory error");
  evaluate->add_option("estimate", est_path, "estimated KITTI trajectory")->required();
  evaluate->add_option("groundtruth", gt_path, "ground-truth KITTI trajectory")->required();
  evaluate->add_option("--out", eval_out, "report directory")->required();

  for (CLI::App* cmd : {extract, localize, simulate, evaluate}) AddCommon(cmd, &o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Config config;
  planeloc_status status = config.Apply(o, simulate->parsed() ? preset : std::nullopt);
  if (status != PLANELOC_OK) return ExitCode(status);

  if (extract->parsed()) {
    status = planeloc_extract_planes_file(config.get(), cloud_path.c_str(), planes_out.c_str(),
                                          PrintText, nullptr);
  } else if (localize->parsed()) {
    status = planeloc_localize_files(config.get(), obs_path.c_str(), planes_path.c_str(),
                                     init_path.c_str(), traj_out.c_str(), PrintText, nullptr);
  } else if (simulate->parsed()) {
    status = planeloc_simulate(config.get(), sim_out.c_str(), PrintText, nullptr);
  } else {
    status = planeloc_evaluate_files(config.get(), est_path.c_str(), gt_path.c_str(),
                                     eval_out.c_str(), PrintText, nullptr);
  }
  return ExitCode(status);
}
