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

// Text formats read and written by the command-line tool.
//
//   cloud         "x y z" per line
//   observations  CSV, header "frame_id,landmark_id,u,v,disparity"; the
//                 disparity field may be empty
//   trajectory    KITTI: 12 numbers per line, row-major 3x4 [R|t] mapping
//                 camera to world; frame id = data line index
//   planes        "id nx ny nz b support_count" per line
//
// Lines starting with '#' and blank lines are ignored everywhere except for
// the observation header, which must be the first non-comment line.
// Numbers are written in shortest round-trip form.

#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "planeloc/evaluation.hpp"
#include "planeloc/optimizer.hpp"
#include "planeloc/plane_map.hpp"
#include "planeloc/tensor_voting.hpp"

namespace planeloc {

std::string FormatDouble(double value);

// Readers throw ParseError (line, column, message) on malformed input and
// Error(kIo) when the file cannot be opened. The stream overloads take a
// display name used in error messages.
PointCloud ReadCloud(const std::filesystem::path& path);
PointCloud ReadCloud(std::istream& in, const std::string& name);
void WriteCloud(const PointCloud& cloud, const std::filesystem::path& path);

std::vector<Observation> ReadObservations(const std::filesystem::path& path);
std::vector<Observation> ReadObservations(std::istream& in, const std::string& name);
void WriteObservations(std::span<const Observation> observations,
                       const std::filesystem::path& path);

// Rotation blocks within 1e-6 of orthonormal are projected onto SO(3);
// others, and reflections, raise Error(kNonRigidPose).
Trajectory ReadTrajectory(const std::filesystem::path& path);
Trajectory ReadTrajectory(std::istream& in, const std::string& name);
// Writes poses in order; frame ids are not stored.
void WriteTrajectory(const Trajectory& trajectory, const std::filesystem::path& path);
std::string FormatKittiLine(const Pose& pose);

std::vector<Plane> ReadPlanes(const std::filesystem::path& path);
std::vector<Plane> ReadPlanes(std::istream& in, const std::string& name);
void WritePlanes(std::span<const Plane> planes, const std::filesystem::path& path);

}  // namespace planeloc
