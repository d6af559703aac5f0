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

#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "planeloc/error.hpp"
#include "planeloc/optimizer.hpp"
#include "planeloc/synthetic.hpp"
#include "test_graphs.hpp"

namespace planeloc {
namespace {

using testing::CodeOf;
using testing::HandProject;
using testing::MakeProblem;
using testing::SinglePoseProblem;

std::map<int, Landmark> ById(const Scene& s) {
  std::map<int, Landmark> m;
  for (const Landmark& l : s.landmarks) m[l.id] = l;
  return m;
}

const Plane& PlaneById(const Scene& s, int id) {
  for (const Plane& p : s.planes) {
    if (p.id == id) return p;
  }
  throw std::runtime_error("no plane " + std::to_string(id));
}

TEST(GenerateScene, NoiselessIsExact) {
  for (const std::string& name : PresetNames()) {
    SceneConfig cfg = PresetScene(name, 3);
    cfg.sigma_map = 0.0;
    cfg.sigma_px = 0.0;
    const Scene s = GenerateScene(cfg);
    const auto lms = ById(s);
    for (const Observation& o : s.observations) {
      const Pose& pose = s.trajectory.at(o.frame_id);
      const Vec3& x = lms.at(o.landmark_id).position;
      EXPECT_LT((o.pixel - HandProject(s.camera, pose, x)).norm(), 1e-9) << name;
      if (o.disparity) {
        const double z = (pose.rotation() * x + pose.translation()).z();
        EXPECT_NEAR(*o.disparity, s.camera.fx * s.camera.baseline / z, 1e-9) << name;
      }
    }
    int on_plane = 0;
    for (const Landmark& l : s.landmarks) {
      if (!l.plane_id) continue;
      ++on_plane;
      const Plane& p = PlaneById(s, *l.plane_id);
      EXPECT_LT(std::abs(p.SignedDistance(l.position)), 1e-12) << name;
    }
    EXPECT_GT(on_plane, 0);
    for (const Vec3& p : s.cloud.points) {
      double best = 1e9;
      for (const Plane& pl : s.planes) best = std::min(best, std::abs(pl.SignedDistance(p)));
      EXPECT_LT(best, 1e-12) << name;
    }
  }
}

TEST(GenerateScene, SameSeedSameScene) {
  const Scene a = GenerateScene(PresetScene("turn", 9));
  const Scene b = GenerateScene(PresetScene("turn", 9));
  ASSERT_EQ(a.cloud.points.size(), b.cloud.points.size());
  for (std::size_t i = 0; i < a.cloud.points.size(); ++i) {
    ASSERT_EQ(a.cloud.points[i], b.cloud.points[i]);
  }
  ASSERT_EQ(a.observations.size(), b.observations.size());
  for (std::size_t i = 0; i < a.observations.size(); ++i) {
    EXPECT_EQ(a.observations[i].frame_id, b.observations[i].frame_id);
    EXPECT_EQ(a.observations[i].landmark_id, b.observations[i].landmark_id);
    EXPECT_EQ(a.observations[i].pixel, b.observations[i].pixel);
    EXPECT_EQ(a.observations[i].disparity, b.observations[i].disparity);
  }
  ASSERT_EQ(a.landmarks.size(), b.landmarks.size());
  for (std::size_t i = 0; i < a.landmarks.size(); ++i) {
    EXPECT_EQ(a.landmarks[i].position, b.landmarks[i].position);
    EXPECT_EQ(a.landmarks[i].plane_id, b.landmarks[i].plane_id);
  }
  const Scene c = GenerateScene(PresetScene("turn", 10));
  EXPECT_NE(a.cloud.points[0], c.cloud.points[0]);
}

TEST(GenerateScene, EveryFrameSeesEnoughLandmarks) {
  for (const std::string& name : PresetNames()) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const SceneConfig cfg = PresetScene(name, seed);
      const Scene s = GenerateScene(cfg);
      ASSERT_EQ(static_cast<int>(s.trajectory.size()), cfg.frame_count);
      std::vector<int> count(s.trajectory.size(), 0);
      for (const Observation& o : s.observations) ++count.at(o.frame_id);
      for (std::size_t f = 0; f < count.size(); ++f) {
        EXPECT_GE(count[f], 10) << name << " seed " << seed << " frame " << f;
      }
    }
  }
  const SceneConfig corridor = PresetScene("corridor", 1);
  EXPECT_EQ(corridor.frame_count, 50);
  EXPECT_EQ(corridor.landmark_count, 300);
  EXPECT_EQ(GenerateScene(corridor).planes.size(), 3u);
}

TEST(GenerateScene, PixelNoiseMatchesSigma) {
  const double sigma = 1.5;
  double sum = 0, sq = 0;
  long n = 0;
  for (std::uint64_t seed = 11; seed < 14; ++seed) {
    SceneConfig cfg = PresetScene("corridor", seed);
    cfg.sigma_px = sigma;
    const Scene s = GenerateScene(cfg);
    const auto lms = ById(s);
    for (const Observation& o : s.observations) {
      const Vec2 r = o.pixel - HandProject(s.camera, s.trajectory.at(o.frame_id),
                                           lms.at(o.landmark_id).position);
      EXPECT_LE(r.cwiseAbs().maxCoeff(), 4 * sigma + 1e-9);
      for (int c = 0; c < 2; ++c) {
        sum += r[c];
        sq += r[c] * r[c];
        ++n;
      }
    }
  }
  ASSERT_GE(n, 10000);
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(sd, sigma, 0.1 * sigma);
  EXPECT_LT(std::abs(mean), 0.05);
}

TEST(GenerateScene, OnPlaneLandmarksStayClose) {
  SceneConfig cfg = PresetScene("orthogonal3", 12);
  cfg.sigma_map = 0.03;
  const Scene s = GenerateScene(cfg);
  for (const Landmark& l : s.landmarks) {
    if (l.plane_id) EXPECT_LE(std::abs(PlaneById(s, *l.plane_id).SignedDistance(l.position)), 0.03);
  }
}

TEST(GenerateScene, InvalidConfigs) {
  SceneConfig cfg = PresetScene("corridor", 1);
  cfg.waypoints.clear();
  EXPECT_EQ(CodeOf([&] { GenerateScene(cfg); }), ErrorCode::kInvalidConfig);
  cfg = PresetScene("corridor", 1);
  cfg.frame_count = 0;
  EXPECT_EQ(CodeOf([&] { GenerateScene(cfg); }), ErrorCode::kInvalidConfig);
  cfg = PresetScene("corridor", 1);
  cfg.landmark_count = 0;
  EXPECT_EQ(CodeOf([&] { GenerateScene(cfg); }), ErrorCode::kInvalidConfig);
  cfg = PresetScene("corridor", 1);
  cfg.on_plane_fraction = 1.5;
  EXPECT_EQ(CodeOf([&] { GenerateScene(cfg); }), ErrorCode::kInvalidConfig);
  cfg = PresetScene("corridor", 1);
  cfg.sigma_px = -1;
  EXPECT_EQ(CodeOf([&] { GenerateScene(cfg); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([] { PresetScene("atrium", 1); }), ErrorCode::kInvalidArgument);
}

TEST(BruteForcePose, AgreesWithLmWithinOneCell) {
  Random rng(51);
  const double span = 0.2;
  const int steps = 9;
  const double cell = 2 * span / (steps - 1);
  for (int trial = 0; trial < 6; ++trial) {
    Random prng(60 + trial);
    SinglePoseProblem p = MakeProblem(prng, Pose::Identity());
    // Rotation lands on a grid vertex, translation does not. A rotational
    // miss of half a cell costs ~15 px here, far more than any translation
    // vertex, so an off-grid rotation would pull the minimizer across cells.
    Twist g;
    g.rho = testing::RandomVec(rng, -0.15, 0.15);
    for (int i = 0; i < 3; ++i) g.phi[i] = cell * (rng.UniformInt(5) - 2);
    const Pose center = Se3Exp(Twist::FromVector(-g.AsVector())) * p.truth;
    p.graph.poses[2].pose = center;
    LmSolve(&p.graph, LmConfig{});
    const Pose lm = p.graph.poses.at(2).pose;
    const Pose bf = BruteForcePose(p.camera, p.landmarks, p.observations, center, span, steps);
    // Both answers expressed as twists about the grid center.
    const Eigen::Matrix<double, 6, 1> a = Se3Log(bf * center.Inverse()).AsVector();
    const Eigen::Matrix<double, 6, 1> b = Se3Log(lm * center.Inverse()).AsVector();
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), cell) << "trial " << trial;
    EXPECT_LT(testing::MaxAbsDiff(lm, p.truth), 1e-6);
  }
}

TEST(BruteForcePose, TruthBeatsEveryVertex) {
  Random rng(52);
  SinglePoseProblem p = MakeProblem(rng, Pose::Identity());
  // Centered on the truth, the winner must be the center itself (zero cost).
  const Pose bf = BruteForcePose(p.camera, p.landmarks, p.observations, p.truth, 0.1, 3);
  EXPECT_EQ(bf.rotation(), p.truth.rotation());
  EXPECT_EQ(bf.translation(), p.truth.translation());
}

TEST(BruteForcePose, ZeroSpanReturnsCenter) {
  Random rng(53);
  SinglePoseProblem p = MakeProblem(rng, Pose::Identity());
  const Pose center(So3Exp(Vec3(0.01, 0.02, 0)), Vec3(0.1, 0, 0));
  const Pose bf = BruteForcePose(p.camera, p.landmarks, p.observations, center, 0.0, 5);
  EXPECT_EQ(bf.rotation(), center.rotation());
  EXPECT_EQ(bf.translation(), center.translation());
  EXPECT_EQ(CodeOf([&] { BruteForcePose(p.camera, p.landmarks, p.observations, center, 0.1, 0); }),
            ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace planeloc
