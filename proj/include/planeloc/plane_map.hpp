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

// Plane extraction from plate points and point-to-plane association.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "planeloc/geometry.hpp"
#include "planeloc/spatial_grid.hpp"
#include "planeloc/tensor_voting.hpp"

namespace planeloc {

// Plane normal . x + offset = 0 with a unit normal.
struct Plane {
  int id = 0;
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  int support_count = 0;
  double rms = 0.0;  // fit residual, meters

  double SignedDistance(const Vec3& p) const { return normal.dot(p) + offset; }
};

struct KMeansCluster {
  Vec3 centroid = Vec3::Zero();
  std::vector<int> members;
};

struct KMeansResult {
  std::vector<KMeansCluster> clusters;
  // Sum of squared member-to-centroid distances after each iteration.
  std::vector<double> objective;
  int iterations = 0;
  // Set when an empty cluster could not be repaired after 3 reseeds.
  bool warning = false;
};

// Lloyd iterations on unit normals with k-means++ seeding. Centroids are
// renormalized every iteration. Deterministic for a given seed.
KMeansResult KMeansNormals(std::span<const Vec3> normals, int k, std::uint64_t seed,
                           int max_iters = 100);

// Groups `points` by their signed offset along `normal`, cutting where
// consecutive sorted offsets differ by more than `gap`. Each subset holds
// indices into `points`, ascending.
std::vector<std::vector<int>> SplitByOffset(std::span<const Vec3> points, const Vec3& normal,
                                            double gap);

// Total-least-squares plane. Throws Error(kDegenerateGeometry) for fewer than
// three points or point sets that are not plane-like.
Plane FitPlane(std::span<const Vec3> points);

struct PlaneExtractionParams {
  VotingParams voting;
  int k = 6;
  int kmeans_max_iters = 100;
  int min_support = 50;
  double gap = 0.5;
  // Cluster centroids closer than this are merged and members deviating by
  // more than this from their cluster normal are dropped.
  double angle_thresh_deg = 15.0;
  // Cell size of the support-point index used by Associate.
  double support_cell = 0.2;
  int workers = 1;

  void Validate() const;
};

class PlaneMap {
 public:
  PlaneMap() = default;

  // A map without supporting points; Associate then checks distance only.
  explicit PlaneMap(std::vector<Plane> planes);
  PlaneMap(std::vector<Plane> planes, std::vector<std::vector<Vec3>> support_points,
           double support_cell);

  const std::vector<Plane>& planes() const { return planes_; }
  bool empty() const { return planes_.empty(); }
  bool has_support_index() const { return !support_.empty(); }

  const Plane* Find(int id) const;

  // Closest plane (by |normal . p + offset|) within dist_thresh whose support
  // patch also passes within dist_thresh of the point. normal_check, when
  // given, excludes planes whose normal deviates by more than angle_thresh_deg
  // (sign-insensitive).
  std::optional<int> Associate(const Vec3& point, double dist_thresh,
                               const std::optional<Vec3>& normal_check = std::nullopt,
                               double angle_thresh_deg = 15.0) const;

 private:
  std::vector<Plane> planes_;
  std::vector<VoxelGrid> support_;  // parallel to planes_ when present
};

PlaneMap BuildPlaneMap(const PointCloud& cloud, const PlaneExtractionParams& params,
                       std::uint64_t seed);

}  // namespace planeloc
