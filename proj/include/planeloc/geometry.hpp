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

// Rigid-body transforms, SE(3) exponential/logarithm, and the rectified
// stereo pinhole camera.
//
// Pose convention: a Pose maps world points into the camera frame
// (p_cam = R * p_world + t). Files store the inverse (world-from-camera).

#pragma once

#include <optional>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

namespace planeloc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kDefaultDepthEpsilon = 1e-6;
inline constexpr double kDefaultDisparityEpsilon = 0.1;

struct Twist {
  Vec3 rho = Vec3::Zero();  // translational part, meters
  Vec3 phi = Vec3::Zero();  // rotation vector, radians

  Eigen::Matrix<double, 6, 1> AsVector() const;
  static Twist FromVector(const Eigen::Matrix<double, 6, 1>& v);
};

class Pose {
 public:
  Pose() = default;
  Pose(const Mat3& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {}

  static Pose Identity() { return Pose(); }

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 operator*(const Vec3& p) const { return rotation_ * p + translation_; }
  Pose operator*(const Pose& other) const;
  Pose Inverse() const;

  // Position of the camera center in world coordinates.
  Vec3 Center() const { return -rotation_.transpose() * translation_; }

  // Max entry of |R^T R - I| and |det R - 1|.
  double RigidityError() const;

  // Same pose with the rotation projected back onto SO(3). Products of many
  // poses drift by rounding; callers that chain them renormalize.
  Pose Normalized() const;

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
};

struct CameraIntrinsics {
  double fx = 700.0;
  double fy = 700.0;
  double cx = 620.0;
  double cy = 188.0;
  double baseline = 0.5;

  // Throws Error(kInvalidArgument) when fx, fy or baseline is not positive.
  void Validate() const;
};

struct Landmark {
  int id = 0;
  Vec3 position = Vec3::Zero();
  std::optional<int> plane_id;
};

Mat3 Hat(const Vec3& v);
Vec3 Vee(const Mat3& m);

Mat3 So3Exp(const Vec3& phi);
Vec3 So3Log(const Mat3& rotation);
Mat3 So3LeftJacobian(const Vec3& phi);
Mat3 So3LeftJacobianInverse(const Vec3& phi);

Pose Se3Exp(const Twist& xi);
Twist Se3Log(const Pose& pose);

// Pixel of a world point seen by a camera at `pose`. Throws
// Error(kNonPositiveDepth) when the camera-frame depth is <= depth_epsilon.
Vec2 Project(const CameraIntrinsics& k, const Pose& pose, const Vec3& point_world,
             double depth_epsilon = kDefaultDepthEpsilon);

// Non-throwing variant for the solver's inner loops.
std::optional<Vec2> TryProject(const CameraIntrinsics& k, const Pose& pose,
                               const Vec3& point_world,
                               double depth_epsilon = kDefaultDepthEpsilon);

// Camera-frame point from a left-image pixel and its disparity. Throws
// Error(kDegenerateDisparity) when disparity <= disparity_epsilon.
Vec3 TriangulateStereo(const CameraIntrinsics& k, const Vec2& pixel_left,
                       double disparity,
                       double disparity_epsilon = kDefaultDisparityEpsilon);

// Disparity a camera-frame point at depth z would produce.
inline double DisparityForDepth(const CameraIntrinsics& k, double z) {
  return k.fx * k.baseline / z;
}

}  // namespace planeloc
