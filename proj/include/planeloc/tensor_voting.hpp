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

// Per-point structure tensors over a LiDAR cloud and their stick / plate /
// ball saliency classification.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "planeloc/geometry.hpp"
#include "planeloc/spatial_grid.hpp"

namespace planeloc {

struct PointCloud {
  std::vector<Vec3> points;
};

// Eigen-decomposition of a symmetric 3x3 matrix. values are descending and
// vectors.col(i) belongs to values[i].
struct SymmetricEigen3 {
  Vec3 values = Vec3::Zero();
  Mat3 vectors = Mat3::Identity();
};

// Closed-form eigenvalues (trigonometric solution of the characteristic
// cubic) with cross-product eigenvectors; falls back to cyclic Jacobi
// rotations when two eigenvalues coincide within 1e-12 of the matrix scale.
SymmetricEigen3 DecomposeSymmetric3(const Mat3& a);

// Cyclic Jacobi sweeps. Exposed for tests and as the degenerate fallback.
SymmetricEigen3 JacobiSymmetric3(const Mat3& a);

struct PointTensor {
  Mat3 tensor = Mat3::Zero();
  Vec3 eigenvalues = Vec3::Zero();   // lambda1 >= lambda2 >= lambda3
  Mat3 eigenvectors = Mat3::Identity();  // columns e1, e2, e3

  static PointTensor FromMatrix(const Mat3& tensor);
};

// The three saliency components of a tensor; they sum back to the
// eigen-reconstruction of the tensor.
struct TensorComponents {
  Mat3 stick;  // (l1 - l2) e1 e1^T
  Mat3 plate;  // (l2 - l3) (e1 e1^T + e2 e2^T)
  Mat3 ball;   // l3 (e1 e1^T + e2 e2^T + e3 e3^T)
};

TensorComponents SplitComponents(const PointTensor& t);

enum class Saliency { kStick, kPlate, kBall };

struct SaliencyLabel {
  Saliency saliency = Saliency::kBall;
  Vec3 orientation = Vec3::Zero();  // zero for Ball
};

struct VotingParams {
  double sigma = 0.5;
  double radius = 1.0;
  int min_neighbors = 3;

  void Validate() const;
};

// Flips v so its largest-magnitude component is positive.
Vec3 CanonicalizeSign(const Vec3& v);

double Decay(double squared_distance, double sigma);

// Decay-weighted covariance of the neighbors of cloud[index] within
// params.radius (the point itself excluded). Throws
// Error(kInsufficientNeighbors) when fewer than params.min_neighbors are found.
PointTensor AccumulateTensor(int index, const PointCloud& cloud, const VoxelGrid& grid,
                             const VotingParams& params);
PointTensor AccumulateTensor(int index, const PointCloud& cloud, const VotingParams& params);

SaliencyLabel Classify(const PointTensor& t);

struct LabeledPoint {
  int index = 0;
  SaliencyLabel label;
};

// One label per point that has enough neighbors, in index order. Work is
// split over `workers` threads; results do not depend on the worker count.
// Throws Error(kEmptyResult) if require_plate is set and no point is Plate.
std::vector<LabeledPoint> LabelCloud(const PointCloud& cloud, const VotingParams& params,
                                     int workers = 1, bool require_plate = true);

}  // namespace planeloc
