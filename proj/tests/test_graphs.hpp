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

// Small factor-graph problems shared by the unit and acceptance tests.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "planeloc/optimizer.hpp"
#include "test_util.hpp"

namespace planeloc::testing {

// Pinhole projection written out by hand.
inline Vec2 HandProject(const CameraIntrinsics& k, const Pose& pose, const Vec3& p) {
  const Vec3 c = pose.rotation() * p + pose.translation();
  return {k.fx * c.x() / c.z() + k.cx, k.fy * c.y() / c.z() + k.cy};
}

inline Eigen::Matrix2d RandomInfo(Random& rng) {
  Eigen::Matrix2d a;
  a << rng.Uniform(0.5, 2), rng.Uniform(-0.5, 0.5), rng.Uniform(-0.5, 0.5), rng.Uniform(0.5, 2);
  return a * a.transpose() + 0.1 * Eigen::Matrix2d::Identity();
}

// Three poses (first fixed), landmarks in front of them, noisy pixels, and
// plane factors on half the landmarks.
inline FactorGraph RandomGraph(Random& rng) {
  FactorGraph g;
  g.lambda_weight = rng.Uniform(0.1, 0.9);
  for (int f = 0; f < 3; ++f) {
    g.poses[f] = {Pose(RandomRotation(rng, 0.1), RandomVec(rng, -0.5, 0.5)), f == 0};
  }
  for (int p = 0; p < 3; ++p) {
    Plane plane;
    plane.id = 10 + p;
    plane.normal = RandomUnit(rng);
    plane.offset = rng.Uniform(-3, 3);
    g.planes[plane.id] = plane;
  }
  for (int l = 0; l < 8; ++l) {
    Landmark lm;
    lm.id = 100 + l;
    lm.position = Vec3(rng.Uniform(-3, 3), rng.Uniform(-2, 2), rng.Uniform(6, 15));
    if (l % 2 == 0) {
      lm.plane_id = 10 + l % 3;
      g.plane_factors.push_back({lm.id, *lm.plane_id, rng.Uniform(10, 200)});
    }
    g.landmarks[lm.id] = lm;
    for (int f = 0; f < 3; ++f) {
      Observation o;
      o.frame_id = f;
      o.landmark_id = lm.id;
      o.pixel = HandProject(g.camera, g.poses[f].pose, lm.position) + RandomVec(rng, -3, 3).head<2>();
      o.info = RandomInfo(rng);
      g.observations.push_back(o);
    }
  }
  g.Validate();
  return g;
}

inline void Perturb(FactorGraph* g, const VariableOrdering& ord, int column, double h) {
  for (const auto& [id, col] : ord.pose_column) {
    if (column >= col && column < col + 6) {
      Eigen::Matrix<double, 6, 1> d = Eigen::Matrix<double, 6, 1>::Zero();
      d[column - col] = h;
      PoseNode& node = g->poses.at(id);
      node.pose = Se3Exp(Twist::FromVector(d)) * node.pose;
      return;
    }
  }
  for (const auto& [id, col] : ord.landmark_column) {
    if (column >= col && column < col + 3) {
      g->landmarks.at(id).position[column - col] += h;
      return;
    }
  }
  throw std::out_of_range("column " + std::to_string(column) + " not in ordering");
}

// Fixed camera 0 at the origin, free camera 1, landmarks spread over three
// mutually orthogonal planes. Rays from the fixed camera plus the plane
// factors pin every landmark, so the free pose is fully determined.
inline FactorGraph AnchoredGraph(Random& rng, const Pose& truth1, const Pose& init1) {
  FactorGraph g;
  g.lambda_weight = 0.5;
  g.poses[0] = {Pose::Identity(), true};
  g.poses[1] = {init1, false};
  const Vec3 normals[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  const double offsets[3] = {3.0, 2.0, -14.0};  // x = -3, y = -2, z = 14
  for (int p = 0; p < 3; ++p) {
    Plane plane;
    plane.id = p;
    plane.normal = normals[p];
    plane.offset = offsets[p];
    g.planes[p] = plane;
  }
  for (int l = 0; l < 20; ++l) {
    const int p = l % 3;
    Vec3 x(rng.Uniform(-3, 3), rng.Uniform(-2, 2), rng.Uniform(8, 14));
    x[p] = -offsets[p];
    Landmark lm{l, x, p};
    for (int f = 0; f < 2; ++f) {
      Observation o;
      o.frame_id = f;
      o.landmark_id = l;
      o.pixel = HandProject(g.camera, f == 0 ? Pose::Identity() : truth1, x);
      g.observations.push_back(o);
    }
    // Start landmarks off their true positions too.
    lm.position += RandomVec(rng, -0.05, 0.05);
    g.landmarks[l] = lm;
    g.plane_factors.push_back({l, p, 100.0});
  }
  return g;
}

// Two fixed cameras a meter apart pin the landmarks; camera 2 is free.
// Landmarks are close so that depth translation is well observed.
struct SinglePoseProblem {
  CameraIntrinsics camera;
  Pose truth;
  std::vector<Landmark> landmarks;
  std::vector<Observation> observations;  // frame 2 only
  FactorGraph graph;
};

inline SinglePoseProblem MakeProblem(Random& rng, const Pose& init) {
  SinglePoseProblem p;
  p.truth = Pose(RandomRotation(rng, 0.1), RandomVec(rng, -0.3, 0.3));
  p.graph.lambda_weight = 1.0;
  p.graph.poses[0] = {Pose::Identity(), true};
  p.graph.poses[1] = {Pose(Mat3::Identity(), Vec3(-1, 0, 0)), true};
  p.graph.poses[2] = {init, false};
  for (int l = 0; l < 20; ++l) {
    const Landmark lm{l, Vec3(rng.Uniform(-3, 3), rng.Uniform(-1.5, 1.5), rng.Uniform(2, 5)),
                      std::nullopt};
    p.landmarks.push_back(lm);
    p.graph.landmarks[l] = lm;
    for (int f = 0; f < 3; ++f) {
      Observation o;
      o.frame_id = f;
      o.landmark_id = l;
      o.pixel = HandProject(p.camera, f == 2 ? p.truth : p.graph.poses[f].pose, lm.position);
      p.graph.observations.push_back(o);
      if (f == 2) p.observations.push_back(o);
    }
  }
  return p;
}

}  // namespace planeloc::testing
