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

#include "planeloc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/Geometry>

#include "planeloc/error.hpp"
#include "planeloc/io.hpp"

namespace planeloc {
namespace {

constexpr char kPlotScript[] = R"(#!/usr/bin/env python3
# Overlays estimated and ground-truth camera paths from trajectory_xy.csv.
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "trajectory_xy.csv"))))
methods = []
for r in rows:
    if r["method"] not in methods:
        methods.append(r["method"])

fig, ax = plt.subplots(figsize=(7, 6))
first = [r for r in rows if r["method"] == methods[0]]
ax.plot([float(r["gt_x"]) for r in first], [float(r["gt_y"]) for r in first],
        "k--", linewidth=2, label="ground truth")
for m in methods:
    sel = [r for r in rows if r["method"] == m]
    ax.plot([float(r["est_x"]) for r in sel], [float(r["est_y"]) for r in sel], label=m)
ax.set_xlabel("x [m]")
ax.set_ylabel("y [m]")
ax.set_aspect("equal", adjustable="datalim")
ax.grid(True, alpha=0.3)
ax.legend()
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "trajectories.png")
fig.savefig(out, dpi=150, bbox_inches="tight")
)";

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

void Trajectory::Validate() const {
  if (frame_ids.size() != poses.size()) {
    throw Error(ErrorCode::kInvalidArgument, "trajectory ids and poses differ in length");
  }
  for (std::size_t i = 1; i < frame_ids.size(); ++i) {
    if (frame_ids[i] <= frame_ids[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "trajectory frame ids must strictly increase");
    }
  }
}

AteMode ParseAteMode(const std::string& text) {
  if (text == "planar") return AteMode::kPlanar;
  if (text == "spatial") return AteMode::kSpatial;
  throw Error(ErrorCode::kInvalidArgument, "mode must be planar or spatial, got '" + text + "'");
}

const char* AteModeName(AteMode mode) {
  return mode == AteMode::kPlanar ? "planar" : "spatial";
}

AteReport ComputeAte(const Trajectory& est, const Trajectory& gt, AteMode mode, bool align) {
  est.Validate();
  gt.Validate();
  std::map<int, std::size_t> gt_index;
  for (std::size_t i = 0; i < gt.size(); ++i) gt_index[gt.frame_ids[i]] = i;

  AteReport report;
  for (std::size_t i = 0; i < est.size(); ++i) {
    auto it = gt_index.find(est.frame_ids[i]);
    if (it == gt_index.end()) continue;
    FrameError fe;
    fe.frame_id = est.frame_ids[i];
    fe.est_position = est.poses[i].Center();
    fe.gt_position = gt.poses[it->second].Center();
    report.frames.push_back(fe);
  }
  if (report.frames.empty()) {
    throw Error(ErrorCode::kNoOverlap, "trajectories share no frame ids");
  }

  if (align && report.frames.size() >= 3) {
    Eigen::Matrix3Xd src(3, report.frames.size());
    Eigen::Matrix3Xd dst(3, report.frames.size());
    for (std::size_t i = 0; i < report.frames.size(); ++i) {
      src.col(i) = report.frames[i].est_position;
      dst.col(i) = report.frames[i].gt_position;
    }
    const Eigen::Matrix4d t = Eigen::umeyama(src, dst, false);
    for (FrameError& fe : report.frames) {
      fe.est_position = t.topLeftCorner<3, 3>() * fe.est_position + t.topRightCorner<3, 1>();
    }
  }

  double sum = 0.0;
  double sum_sq = 0.0;
  report.min = std::numeric_limits<double>::infinity();
  report.max = 0.0;
  for (FrameError& fe : report.frames) {
    const Vec3 d = fe.est_position - fe.gt_position;
    fe.error = mode == AteMode::kPlanar ? std::sqrt(d.x() * d.x() + d.y() * d.y()) : d.norm();
    sum += fe.error;
    sum_sq += fe.error * fe.error;
    report.min = std::min(report.min, fe.error);
    report.max = std::max(report.max, fe.error);
  }
  const double n = static_cast<double>(report.frames.size());
  report.mean = sum / n;
  report.rmse = std::sqrt(sum_sq / n);
  double var = 0.0;
  for (const FrameError& fe : report.frames) {
    var += (fe.error - report.mean) * (fe.error - report.mean);
  }
  report.std = std::sqrt(var / n);
  return report;
}

std::string SummaryRow(const std::string& name, const AteReport& r) {
  return name + "," + FormatDouble(r.mean) + "," + FormatDouble(r.rmse) + "," +
         FormatDouble(r.std) + "," + FormatDouble(r.max) + "," + FormatDouble(r.min);
}

void WriteReport(const std::vector<std::pair<std::string, AteReport>>& reports,
                 const std::filesystem::path& out_dir) {
  if (reports.empty()) throw Error(ErrorCode::kInvalidArgument, "no reports to write");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error(ErrorCode::kIo, "cannot create directory " + out_dir.string());
  }

  std::ostringstream summary, per_frame, xy;
  summary << "method,mean,rmse,std,max,min\n";
  per_frame << "method,frame_id,error\n";
  xy << "method,frame_id,est_x,est_y,est_z,gt_x,gt_y,gt_z\n";
  for (const auto& [name, r] : reports) {
    summary << SummaryRow(name, r) << '\n';
    for (const FrameError& fe : r.frames) {
      per_frame << name << ',' << fe.frame_id << ',' << FormatDouble(fe.error) << '\n';
      xy << name << ',' << fe.frame_id;
      for (int c = 0; c < 3; ++c) xy << ',' << FormatDouble(fe.est_position[c]);
      for (int c = 0; c < 3; ++c) xy << ',' << FormatDouble(fe.gt_position[c]);
      xy << '\n';
    }
  }
  WriteFile(out_dir / "ate_summary.csv", summary.str());
  WriteFile(out_dir / "ate_per_frame.csv", per_frame.str());
  WriteFile(out_dir / "trajectory_xy.csv", xy.str());
  WriteFile(out_dir / "plot_trajectories.py", kPlotScript);
}

}  // namespace planeloc
