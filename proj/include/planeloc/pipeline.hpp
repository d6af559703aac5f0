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

// The four commands of the tool as library calls. Every command writes the
// effective configuration next to its outputs.

#pragma once

#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "planeloc/config.hpp"
#include "planeloc/evaluation.hpp"
#include "planeloc/optimizer.hpp"
#include "planeloc/plane_map.hpp"
#include "planeloc/synthetic.hpp"

namespace planeloc {

struct LocalizationRun {
  Trajectory trajectory;  // one pose per frame id 0..max, rejected frames carried forward
  std::vector<FrameResult> accepted;
  std::vector<int> rejected;
};

// Feeds frames in id order through a Localizer. Frames failing with
// kInsufficientObservations are logged and keep the previous pose; other
// errors propagate. One deterministic line per frame goes to `log` if given.
LocalizationRun LocalizeSequence(std::span<const Observation> observations,
                                 std::shared_ptr<const PlaneMap> plane_map,
                                 const Pose& initial_pose, const LocalizerConfig& config,
                                 std::ostream* log = nullptr);

// Scene for the configured preset with the sim.* overrides applied.
SceneConfig SimulationConfig(const RunConfig& config);

// Throws Error(kEmptyResult, "no points") for an empty cloud.
std::vector<Plane> RunExtractPlanes(const std::filesystem::path& cloud_path,
                                    const RunConfig& config,
                                    const std::filesystem::path& out_path, std::ostream& out);

// Writes the KITTI trajectory to out_path, the per-frame log to
// out_path + ".log" and the configuration to out_path + ".config".
LocalizationRun RunLocalize(const std::filesystem::path& observations_path,
                            const std::filesystem::path& planes_path,
                            const std::filesystem::path& initial_pose_path,
                            const RunConfig& config, const std::filesystem::path& out_path,
                            std::ostream& out);

// Writes cloud.txt, observations.csv, groundtruth.txt, init_pose.txt,
// planes.txt, landmarks.csv and run.config into out_dir.
Scene RunSimulate(const RunConfig& config, const std::filesystem::path& out_dir,
                  std::ostream& out);

// Writes the report files and run.config into out_dir and prints the
// summary table to `out`.
AteReport RunEvaluate(const std::filesystem::path& est_path,
                      const std::filesystem::path& gt_path, const RunConfig& config,
                      const std::filesystem::path& out_dir, std::ostream& out);

}  // namespace planeloc
