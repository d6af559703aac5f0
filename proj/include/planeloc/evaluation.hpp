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

// Absolute trajectory error between an estimate and ground truth, and the
// report files built from it.

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "planeloc/geometry.hpp"

namespace planeloc {

struct Trajectory {
  std::vector<int> frame_ids;  // strictly increasing
  std::vector<Pose> poses;     // world-to-camera, parallel to frame_ids

  // Throws Error(kInvalidArgument) on size mismatch or unordered ids.
  void Validate() const;
  std::size_t size() const { return poses.size(); }
};

enum class AteMode { kPlanar, kSpatial };

// Parses "planar" or "spatial"; throws Error(kInvalidArgument) otherwise.
AteMode ParseAteMode(const std::string& text);
const char* AteModeName(AteMode mode);

struct FrameError {
  int frame_id = 0;
  double error = 0.0;
  Vec3 est_position = Vec3::Zero();  // camera center, after optional alignment
  Vec3 gt_position = Vec3::Zero();
};

struct AteReport {
  double mean = 0.0;
  double rmse = 0.0;
  double std = 0.0;  // population
  double max = 0.0;
  double min = 0.0;
  std::vector<FrameError> frames;
};

// Errors over the frame ids both trajectories contain. Planar mode measures
// the x, y distance of camera centers, spatial mode adds z. With align set,
// the estimate is first moved by the rigid transform that best fits its
// centers onto ground truth. Throws Error(kNoOverlap) without common frames.
AteReport ComputeAte(const Trajectory& est, const Trajectory& gt, AteMode mode,
                     bool align = false);

// Writes ate_summary.csv, ate_per_frame.csv, trajectory_xy.csv and
// plot_trajectories.py into out_dir (created if missing). Throws Error(kIo).
void WriteReport(const std::vector<std::pair<std::string, AteReport>>& reports,
                 const std::filesystem::path& out_dir);

// One "name,mean,rmse,std,max,min" row as written to the summary CSV.
std::string SummaryRow(const std::string& name, const AteReport& report);

}  // namespace planeloc
