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

#include "planeloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "planeloc/error.hpp"

namespace planeloc {
namespace {

// Below this angle the trigonometric ratios switch to their Taylor series.
constexpr double kSmallAngle = 1e-4;

// sin(theta) below this counts as an exact half turn.
constexpr double kPiSineFloor = 1e-10;

}  // namespace

Eigen::Matrix<double, 6, 1> Twist::AsVector() const {
  Eigen::Matrix<double, 6, 1> v;
  v << rho, phi;
  return v;
}

Twist Twist::FromVector(const Eigen::Matrix<double, 6, 1>& v) {
  return Twist{v.head<3>(), v.tail<3>()};
}

Pose Pose::operator*(const Pose& other) const {
  return Pose(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_);
}

Pose Pose::Inverse() const {
  const Mat3 rt = rotation_.transpose();
  return Pose(rt, -rt * translation_);
}

double Pose::RigidityError() const {
  const Mat3 gram = rotation_.transpose() * rotation_ - Mat3::Identity();
  return std::max(gram.cwiseAbs().maxCoeff(), std::abs(rotation_.determinant() - 1.0));
}

Pose Pose::Normalized() const {
  return Pose(Eigen::Quaterniond(rotation_).normalized().toRotationMatrix(), translation_);
}

void CameraIntrinsics::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !(baseline > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "camera intrinsics require fx, fy, baseline > 0");
  }
}

Mat3 Hat(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<    0.0, -v.z(),  v.y(),
        v.z(),    0.0, -v.x(),
       -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

Vec3 Vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

Mat3 So3Exp(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a;  // sin(t)/t
  double b;  // (1-cos(t))/t^2
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    const double h = std::sin(0.5 * theta);
    b = 2.0 * h * h / theta2;
  }
  const Mat3 w = Hat(phi);
  return Mat3::Identity() + a * w + b * w * w;
}

Vec3 So3Log(const Mat3& rotation) {
  const double c = std::clamp((rotation.trace() - 1.0) * 0.5, -1.0, 1.0);
  const Vec3 w = 0.5 * Vee(rotation - rotation.transpose());  // sin(t) * axis
  const double s = w.norm();
  const double theta = std::atan2(s, c);

  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    return (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0) * w;
  }
  if (s > kSmallAngle || c > 0.0) {
    return (theta / s) * w;
  }

  // Near pi the antisymmetric part vanishes; recover the axis from the
  // symmetric part, (R + R^T)/2 - cos(t) I = (1 - cos(t)) a a^T.
  const Mat3 sym = 0.5 * (rotation + rotation.transpose()) - c * Mat3::Identity();
  int col = 0;
  sym.diagonal().maxCoeff(&col);
  Vec3 axis = sym.col(col) / std::sqrt(std::max(sym(col, col), 1e-300));
  axis.normalize();
  if (s > kPiSineFloor) {
    if (axis.dot(w) < 0.0) axis = -axis;
  } else {
    // Pi up to rounding: +axis and -axis are the same rotation and w is
    // noise, so pick the axis whose first nonzero component is positive.
    for (int i = 0; i < 3; ++i) {
      if (std::abs(axis[i]) > 1e-12) {
        if (axis[i] < 0.0) axis = -axis;
        break;
      }
    }
  }
  return theta * axis;
}

Mat3 So3LeftJacobian(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  double b;  // (1-cos(t))/t^2
  double c;  // (t-sin(t))/t^3
  if (theta < kSmallAngle) {
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    c = 1.0 / 6.0 - theta2 / 120.0 + theta2 * theta2 / 5040.0;
  } else {
    const double h = std::sin(0.5 * theta);
    b = 2.0 * h * h / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }
  const Mat3 w = Hat(phi);
  return Mat3::Identity() + b * w + c * w * w;
}

Mat3 So3LeftJacobianInverse(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  double d;  // (1 - (t/2) cot(t/2)) / t^2
  if (theta < kSmallAngle) {
    d = 1.0 / 12.0 + theta2 / 720.0 + theta2 * theta2 / 30240.0;
  } else {
    const double half = 0.5 * theta;
    d = (1.0 - half * std::cos(half) / std::sin(half)) / theta2;
  }
  const Mat3 w = Hat(phi);
  return Mat3::Identity() - 0.5 * w + d * w * w;
}

Pose Se3Exp(const Twist& xi) {
  return Pose(So3Exp(xi.phi), So3LeftJacobian(xi.phi) * xi.rho);
}

Twist Se3Log(const Pose& pose) {
  const Vec3 phi = So3Log(pose.rotation());
  return Twist{So3LeftJacobianInverse(phi) * pose.translation(), phi};
}

std::optional<Vec2> TryProject(const CameraIntrinsics& k, const Pose& pose,
                               const Vec3& point_world, double depth_epsilon) {
  const Vec3 pc = pose * point_world;
  if (!(pc.z() > depth_epsilon)) return std::nullopt;
  return Vec2(k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy);
}

Vec2 Project(const CameraIntrinsics& k, const Pose& pose, const Vec3& point_world,
             double depth_epsilon) {
  auto pixel = TryProject(k, pose, point_world, depth_epsilon);
  if (!pixel) {
    throw Error(ErrorCode::kNonPositiveDepth, "point is not in front of the camera");
  }
  return *pixel;
}

Vec3 TriangulateStereo(const CameraIntrinsics& k, const Vec2& pixel_left,
                       double disparity, double disparity_epsilon) {
  if (!(disparity > disparity_epsilon)) {
    throw Error(ErrorCode::kDegenerateDisparity, "disparity below threshold");
  }
  const double z = k.fx * k.baseline / disparity;
  return Vec3((pixel_left.x() - k.cx) * z / k.fx, (pixel_left.y() - k.cy) * z / k.fy, z);
}

}  // namespace planeloc
