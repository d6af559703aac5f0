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

#include "planeloc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "planeloc/error.hpp"
#include "planeloc/random.hpp"

namespace planeloc {
namespace {

constexpr int kMaxRejections = 10000;

double DegToRad(double deg) { return deg * std::numbers::pi / 180.0; }

Pose CameraPose(double x, double y, double z, double heading) {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  Mat3 world_from_cam;
  world_from_cam.col(0) = Vec3(s, -c, 0.0);
  world_from_cam.col(1) = Vec3(0.0, 0.0, -1.0);
  world_from_cam.col(2) = Vec3(c, s, 0.0);
  return Pose(world_from_cam, Vec3(x, y, z)).Inverse();
}

std::vector<Pose> BuildTrajectory(const SceneConfig& cfg) {
  const auto& wp = cfg.waypoints;
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < wp.size(); ++i) {
    cumulative.push_back(cumulative.back() + std::hypot(wp[i].x - wp[i - 1].x,
                                                        wp[i].y - wp[i - 1].y));
  }
  const double total = cumulative.back();
  std::vector<Pose> poses;
  for (int f = 0; f < cfg.frame_count; ++f) {
    const double s = cfg.frame_count > 1 ? total * f / (cfg.frame_count - 1) : 0.0;
    std::size_t seg = 1;
    while (seg + 1 < wp.size() && cumulative[seg] < s) ++seg;
    double x = wp[0].x, y = wp[0].y, heading = wp[0].heading_deg;
    if (wp.size() > 1) {
      const double len = cumulative[seg] - cumulative[seg - 1];
      const double a = len > 0.0 ? std::clamp((s - cumulative[seg - 1]) / len, 0.0, 1.0) : 0.0;
      x = wp[seg - 1].x + a * (wp[seg].x - wp[seg - 1].x);
      y = wp[seg - 1].y + a * (wp[seg].y - wp[seg - 1].y);
      heading = wp[seg - 1].heading_deg + a * (wp[seg].heading_deg - wp[seg - 1].heading_deg);
    }
    poses.push_back(CameraPose(x, y, cfg.camera_height, DegToRad(heading)));
  }
  return poses;
}

// True if the segment camera -> point crosses a plane patch more than
// `margin` meters before reaching the point.
bool Occluded(const Vec3& camera, const Vec3& point, std::span<const PlaneRect> rects,
              double margin) {
  const Vec3 dir = point - camera;
  const double length = dir.norm();
  for (const PlaneRect& r : rects) {
    const Vec3 n = r.Normal();
    const double denom = n.dot(dir);
    if (std::abs(denom) < 1e-12) continue;
    const double t = -(n.dot(camera) + r.Offset()) / denom;
    if (t <= 0.0 || t >= 1.0 || (1.0 - t) * length <= margin) continue;
    const Vec3 q = camera + t * dir - r.corner;
    const double a = q.dot(r.edge_u) / r.edge_u.squaredNorm();
    const double b = q.dot(r.edge_v) / r.edge_v.squaredNorm();
    if (a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0) return true;
  }
  return false;
}

}  // namespace

void SceneConfig::Validate() const {
  if (waypoints.empty() || frame_count < 1) {
    throw Error(ErrorCode::kInvalidConfig, "scene needs a non-empty trajectory");
  }
  if (landmark_count < 1) throw Error(ErrorCode::kInvalidConfig, "scene needs landmarks");
  if (!(on_plane_fraction >= 0.0 && on_plane_fraction <= 1.0) ||
      !(outlier_rate >= 0.0 && outlier_rate <= 1.0) || !(sigma_map >= 0.0) ||
      !(sigma_px >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "fractions must lie in [0,1] and sigmas >= 0");
  }
  if (on_plane_fraction > 0.0 && planes.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "on-plane landmarks need at least one plane");
  }
  if (on_plane_fraction < 1.0 && free_regions.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "free landmarks need a free region");
  }
  if (image_width < 1 || image_height < 1 || !(min_depth > 0.0) || !(max_depth > min_depth)) {
    throw Error(ErrorCode::kInvalidConfig, "invalid image or depth range");
  }
  camera.Validate();
}

Scene GenerateScene(const SceneConfig& cfg) {
  cfg.Validate();
  Scene scene;
  scene.camera = cfg.camera;

  // Distinct plane equations; coplanar patches share one id.
  std::vector<int> rect_plane(cfg.planes.size());
  for (std::size_t i = 0; i < cfg.planes.size(); ++i) {
    const Vec3 n = cfg.planes[i].Normal();
    const double b = cfg.planes[i].Offset();
    int found = -1;
    for (const Plane& p : scene.planes) {
      if ((p.normal - n).norm() < 1e-9 && std::abs(p.offset - b) < 1e-9) found = p.id;
    }
    if (found < 0) {
      found = static_cast<int>(scene.planes.size());
      scene.planes.push_back(Plane{found, n, b, 0, 0.0});
    }
    rect_plane[i] = found;
  }

  Random map_rng(Random::SubSeed(cfg.seed, "map"));
  for (std::size_t i = 0; i < cfg.planes.size(); ++i) {
    const PlaneRect& r = cfg.planes[i];
    for (int j = 0; j < r.map_points; ++j) {
      const double a = map_rng.Uniform01();
      const double b = map_rng.Uniform01();
      Vec3 p = r.corner + a * r.edge_u + b * r.edge_v;
      for (int c = 0; c < 3; ++c) p[c] += map_rng.Normal(0.0, cfg.sigma_map);
      scene.cloud.points.push_back(p);
    }
    scene.planes[rect_plane[i]].support_count += r.map_points;
  }

  Random lm_rng(Random::SubSeed(cfg.seed, "landmarks"));
  const int on_plane =
      static_cast<int>(std::lround(cfg.landmark_count * cfg.on_plane_fraction));
  double total_area = 0.0;
  for (const PlaneRect& r : cfg.planes) total_area += r.Area();
  for (int i = 0; i < cfg.landmark_count; ++i) {
    Landmark lm;
    lm.id = i;
    if (i < on_plane) {
      double pick = lm_rng.Uniform01() * total_area;
      std::size_t ri = 0;
      while (ri + 1 < cfg.planes.size() && pick > cfg.planes[ri].Area()) {
        pick -= cfg.planes[ri].Area();
        ++ri;
      }
      const PlaneRect& r = cfg.planes[ri];
      const double a = lm_rng.Uniform01();
      const double b = lm_rng.Uniform01();
      const double off = lm_rng.Uniform(-cfg.sigma_map, cfg.sigma_map);
      lm.position = r.corner + a * r.edge_u + b * r.edge_v + off * r.Normal();
      lm.plane_id = rect_plane[ri];
    } else {
      bool placed = false;
      for (int attempt = 0; attempt < kMaxRejections && !placed; ++attempt) {
        const Box& box = cfg.free_regions[lm_rng.UniformInt(
            static_cast<int>(cfg.free_regions.size()))];
        Vec3 p;
        for (int c = 0; c < 3; ++c) p[c] = lm_rng.Uniform(box.min[c], box.max[c]);
        bool clear = true;
        for (const Plane& pl : scene.planes) {
          clear = clear && std::abs(pl.SignedDistance(p)) >= cfg.free_clearance;
        }
        if (clear) {
          lm.position = p;
          placed = true;
        }
      }
      if (!placed) {
        throw Error(ErrorCode::kInvalidConfig, "free regions leave no room for landmarks");
      }
    }
    scene.landmarks.push_back(lm);
  }

  scene.trajectory = BuildTrajectory(cfg);

  Random obs_rng(Random::SubSeed(cfg.seed, "observations"));
  const double max_noise = 4.0 * cfg.sigma_px;
  for (int f = 0; f < static_cast<int>(scene.trajectory.size()); ++f) {
    const Pose& pose = scene.trajectory[f];
    const Vec3 center = pose.Center();
    int visible = 0;
    for (const Landmark& lm : scene.landmarks) {
      const Vec3 pc = pose * lm.position;
      if (pc.z() < cfg.min_depth || pc.z() > cfg.max_depth) continue;
      const Vec2 pixel = Project(cfg.camera, pose, lm.position);
      if (pixel.x() < 0.0 || pixel.y() < 0.0 || pixel.x() > cfg.image_width ||
          pixel.y() > cfg.image_height) {
        continue;
      }
      if (cfg.occlusion && Occluded(center, lm.position, cfg.planes, 0.05)) continue;

      Vec2 noise = Vec2::Zero();
      do {
        noise = Vec2(obs_rng.Normal(0.0, cfg.sigma_px), obs_rng.Normal(0.0, cfg.sigma_px));
      } while (noise.norm() > max_noise);
      double dnoise = 0.0;
      do {
        dnoise = obs_rng.Normal(0.0, cfg.sigma_px);
      } while (std::abs(dnoise) > max_noise);

      Observation obs;
      obs.frame_id = f;
      obs.landmark_id = lm.id;
      obs.pixel = pixel + noise;
      const double disparity = DisparityForDepth(cfg.camera, pc.z()) + dnoise;
      if (disparity > kDefaultDisparityEpsilon) obs.disparity = disparity;
      if (cfg.outlier_rate > 0.0 && obs_rng.Uniform01() < cfg.outlier_rate) {
        obs.pixel = Vec2(obs_rng.Uniform(0.0, cfg.image_width),
                         obs_rng.Uniform(0.0, cfg.image_height));
      }
      scene.observations.push_back(obs);
      ++visible;
    }
    if (visible < cfg.min_observations_per_frame) {
      throw Error(ErrorCode::kInvalidConfig,
                  "frame " + std::to_string(f) + " sees only " + std::to_string(visible) +
                      " landmarks");
    }
  }
  return scene;
}

std::vector<std::string> PresetNames() { return {"corridor", "orthogonal3", "turn"}; }

SceneConfig PresetScene(std::string_view name, std::uint64_t seed) {
  SceneConfig cfg;
  cfg.seed = seed;
  constexpr double kWallHeight = 4.0;
  const Vec3 up(0.0, 0.0, kWallHeight);
  if (name == "orthogonal3") {
    // Three mutually orthogonal 10 m patches meeting at (2, -3, 1).
    const Vec3 c(2.0, -3.0, 1.0);
    cfg.planes = {
        {c, Vec3(10.0, 0.0, 0.0), Vec3(0.0, 10.0, 0.0), 5000},
        {c, Vec3(0.0, 10.0, 0.0), Vec3(0.0, 0.0, 10.0), 5000},
        {c, Vec3(10.0, 0.0, 0.0), Vec3(0.0, 0.0, 10.0), 5000},
    };
    cfg.waypoints = {{11.0, 6.0, 225.0}, {8.0, 3.0, 225.0}};
    cfg.frame_count = 20;
    cfg.camera_height = 3.0;
    cfg.landmark_count = 300;
    cfg.on_plane_fraction = 0.8;
    cfg.free_regions = {{Vec3(4.0, -1.0, 2.5), Vec3(8.0, 3.0, 5.0)}};
    return cfg;
  }
  if (name == "corridor") {
    // Straight 6 m wide corridor along +x.
    cfg.planes = {
        {Vec3(-5.0, -3.0, 0.0), Vec3(65.0, 0.0, 0.0), Vec3(0.0, 6.0, 0.0), 10000},
        {Vec3(-5.0, -3.0, 0.0), Vec3(65.0, 0.0, 0.0), up, 7000},
        {Vec3(-5.0, 3.0, 0.0), Vec3(65.0, 0.0, 0.0), up, 7000},
    };
    cfg.waypoints = {{0.0, 0.0, 0.0}, {45.0, 0.0, 0.0}};
    cfg.frame_count = 50;
    cfg.landmark_count = 300;
    cfg.on_plane_fraction = 0.7;
    cfg.free_regions = {{Vec3(0.0, -2.0, 1.0), Vec3(60.0, 2.0, 3.0)}};
    return cfg;
  }
  if (name == "turn") {
    // L-shaped corridor: east along +x, then a left turn to north at x = 24.
    // The north leg runs well past the last camera so it never faces an
    // empty end.
    cfg.planes = {
        {Vec3(-5.0, -3.0, 0.0), Vec3(32.0, 0.0, 0.0), Vec3(0.0, 6.0, 0.0), 5000},  // floor A
        {Vec3(21.0, 3.0, 0.0), Vec3(6.0, 0.0, 0.0), Vec3(0.0, 42.0, 0.0), 6000},   // floor B
        {Vec3(-5.0, -3.0, 0.0), Vec3(32.0, 0.0, 0.0), up, 3500},                   // outer y=-3
        {Vec3(-5.0, 3.0, 0.0), Vec3(26.0, 0.0, 0.0), up, 3000},                    // inner y=3
        {Vec3(27.0, -3.0, 0.0), Vec3(0.0, 48.0, 0.0), up, 5000},                   // outer x=27
        {Vec3(21.0, 3.0, 0.0), Vec3(0.0, 42.0, 0.0), up, 4500},                    // inner x=21
    };
    cfg.waypoints = {{0.0, 0.0, 0.0}, {20.0, 0.0, 0.0}, {24.0, 4.0, 90.0}, {24.0, 24.0, 90.0}};
    cfg.frame_count = 50;
    cfg.landmark_count = 600;
    cfg.on_plane_fraction = 0.7;
    cfg.free_regions = {{Vec3(-5.0, -2.0, 1.0), Vec3(20.0, 2.0, 3.0)},
                        {Vec3(22.0, 4.0, 1.0), Vec3(26.0, 45.0, 3.0)}};
    return cfg;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown scene preset '" + std::string(name) + "'");
}

Pose BruteForcePose(const CameraIntrinsics& k, std::span<const Landmark> landmarks,
                    std::span<const Observation> observations, const Pose& center,
                    double span, int steps) {
  if (steps < 1 || !(span >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "brute force needs steps >= 1 and span >= 0");
  }
  std::vector<const Landmark*> matched;
  for (const Observation& obs : observations) {
    const Landmark* found = nullptr;
    for (const Landmark& lm : landmarks) {
      if (lm.id == obs.landmark_id) found = &lm;
    }
    if (!found) throw Error(ErrorCode::kInvalidArgument, "observation without landmark");
    matched.push_back(found);
  }

  std::vector<double> axis(steps, 0.0);
  for (int i = 0; i < steps && steps > 1; ++i) axis[i] = -span + 2.0 * span * i / (steps - 1);

  auto cost_of = [&](const Pose& pose) {
    double cost = 0.0;
    for (std::size_t i = 0; i < observations.size(); ++i) {
      auto pixel = TryProject(k, pose, matched[i]->position);
      if (!pixel) return std::numeric_limits<double>::infinity();
      const Vec2 r = observations[i].pixel - *pixel;
      cost += r.dot(observations[i].info * r);
    }
    return cost;
  };

  Pose best = center;
  double best_cost = cost_of(center);
  long total = 1;
  for (int d = 0; d < 6; ++d) total *= steps;
  Eigen::Matrix<double, 6, 1> xi;
  for (long n = 0; n < total; ++n) {
    long rem = n;
    for (int d = 0; d < 6; ++d) {
      xi[d] = axis[rem % steps];
      rem /= steps;
    }
    const Pose candidate = Se3Exp(Twist::FromVector(xi)) * center;
    const double c = cost_of(candidate);
    if (c < best_cost) {
      best_cost = c;
      best = candidate;
    }
  }
  return best;
}

}  // namespace planeloc
