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

// Ground-truth scenes for end-to-end checks: planar map patches, a camera
// path, landmarks on and off the planes, and noisy stereo observations.
// World frame is z-up; cameras look horizontally (x right, y down, z forward).

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "planeloc/geometry.hpp"
#include "planeloc/optimizer.hpp"
#include "planeloc/plane_map.hpp"
#include "planeloc/tensor_voting.hpp"

namespace planeloc {

// Parallelogram corner + s * edge_u + t * edge_v, s, t in [0, 1].
struct PlaneRect {
  Vec3 corner = Vec3::Zero();
  Vec3 edge_u = Vec3::UnitX();
  Vec3 edge_v = Vec3::UnitY();
  int map_points = 1000;

  Vec3 Normal() const { return CanonicalizeSign(edge_u.cross(edge_v).normalized()); }
  double Offset() const { return -Normal().dot(corner); }
  double Area() const { return edge_u.cross(edge_v).norm(); }
};

struct KeyPose {
  double x = 0.0;
  double y = 0.0;
  double heading_deg = 0.0;  // 0 looks along +x, 90 along +y
};

struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
};

struct SceneConfig {
  std::vector<PlaneRect> planes;
  std::vector<KeyPose> waypoints;
  int frame_count = 50;
  double camera_height = 1.5;

  int landmark_count = 300;
  double on_plane_fraction = 0.7;
  std::vector<Box> free_regions;  // where off-plane landmarks are drawn
  double free_clearance = 1.0;    // min distance of free landmarks to any plane

  double sigma_map = 0.01;  // meters
  double sigma_px = 1.0;    // pixels, applied to u, v and disparity
  double outlier_rate = 0.0;

  CameraIntrinsics camera;
  int image_width = 1240;
  int image_height = 376;
  double min_depth = 0.5;
  double max_depth = 30.0;
  bool occlusion = true;
  int min_observations_per_frame = 10;

  std::uint64_t seed = 0;

  void Validate() const;
};

struct Scene {
  CameraIntrinsics camera;
  PointCloud cloud;
  std::vector<Plane> planes;       // one per distinct plane equation
  std::vector<Pose> trajectory;    // world-to-camera, frame id = index
  std::vector<Landmark> landmarks; // true positions and plane ids
  std::vector<Observation> observations;
};

// Throws Error(kInvalidConfig) for an empty trajectory, zero landmarks, or a
// frame that would see fewer than min_observations_per_frame landmarks.
Scene GenerateScene(const SceneConfig& config);

// "corridor", "orthogonal3" or "turn". Throws Error(kInvalidArgument) for
// other names.
SceneConfig PresetScene(std::string_view name, std::uint64_t seed);
std::vector<std::string> PresetNames();

// Exhaustive search over twists dx in [-span, span]^6 (steps samples per
// axis) for the pose exp(dx) * center minimizing the reprojection cost of a
// single frame. Only meant for tiny problems.
Pose BruteForcePose(const CameraIntrinsics& k, std::span<const Landmark> landmarks,
                    std::span<const Observation> observations, const Pose& center,
                    double span, int steps);

}  // namespace planeloc
