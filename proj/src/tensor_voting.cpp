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

#include "planeloc/tensor_voting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <thread>

#include "planeloc/error.hpp"

namespace planeloc {
namespace {

constexpr double kCoincidentEigenvalues = 1e-12;

// Unit eigenvector for an eigenvalue of multiplicity one: the rows of
// (A - lambda I) span the orthogonal complement, so the longest cross
// product of two rows points along the eigenvector.
Vec3 IsolatedEigenvector(const Mat3& a, double lambda) {
  const Mat3 m = a - lambda * Mat3::Identity();
  const Vec3 r0 = m.row(0).transpose();
  const Vec3 r1 = m.row(1).transpose();
  const Vec3 r2 = m.row(2).transpose();
  const std::array<Vec3, 3> candidates = {r0.cross(r1), r0.cross(r2), r1.cross(r2)};
  int best = 0;
  double best_norm = candidates[0].squaredNorm();
  for (int i = 1; i < 3; ++i) {
    const double n = candidates[i].squaredNorm();
    if (n > best_norm) {
      best_norm = n;
      best = i;
    }
  }
  if (best_norm == 0.0) return Vec3::UnitX();
  return candidates[best] / std::sqrt(best_norm);
}

// Eigenvector for `lambda` restricted to the plane orthogonal to `v0`.
Vec3 ComplementEigenvector(const Mat3& a, const Vec3& v0, double lambda) {
  Vec3 u = std::abs(v0.x()) > std::abs(v0.y()) ? Vec3(-v0.z(), 0.0, v0.x())
                                                : Vec3(0.0, v0.z(), -v0.y());
  u.normalize();
  const Vec3 v = v0.cross(u);
  const Vec3 au = a * u;
  const Vec3 av = a * v;
  double m00 = u.dot(au) - lambda;
  double m01 = u.dot(av);
  double m11 = v.dot(av) - lambda;
  const double abs00 = std::abs(m00);
  const double abs01 = std::abs(m01);
  const double abs11 = std::abs(m11);
  if (abs00 >= abs11) {
    if (std::max(abs00, abs01) == 0.0) return u;
    if (abs00 >= abs01) {
      m01 /= m00;
      m00 = 1.0 / std::sqrt(1.0 + m01 * m01);
      m01 *= m00;
    } else {
      m00 /= m01;
      m01 = 1.0 / std::sqrt(1.0 + m00 * m00);
      m00 *= m01;
    }
    return (m01 * u - m00 * v).normalized();
  }
  if (std::max(abs11, abs01) == 0.0) return u;
  if (abs11 >= abs01) {
    m01 /= m11;
    m11 = 1.0 / std::sqrt(1.0 + m01 * m01);
    m01 *= m11;
  } else {
    m11 /= m01;
    m01 = 1.0 / std::sqrt(1.0 + m11 * m11);
    m11 *= m01;
  }
  return (m11 * u - m01 * v).normalized();
}

void SortDescending(SymmetricEigen3* e) {
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return e->values[i] > e->values[j]; });
  SymmetricEigen3 sorted;
  for (int i = 0; i < 3; ++i) {
    sorted.values[i] = e->values[order[i]];
    sorted.vectors.col(i) = e->vectors.col(order[i]);
  }
  *e = sorted;
}

// Make the basis right-handed so e3 = e1 x e2.
void MakeRightHanded(SymmetricEigen3* e) {
  if (e->vectors.determinant() < 0.0) e->vectors.col(2) = -e->vectors.col(2);
}

}  // namespace

SymmetricEigen3 JacobiSymmetric3(const Mat3& a_in) {
  Mat3 a = 0.5 * (a_in + a_in.transpose());
  Mat3 v = Mat3::Identity();
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
    if (off <= 1e-18 * scale) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Mat3 rot = Mat3::Identity();
        rot(p, p) = c;
        rot(q, q) = c;
        rot(p, q) = s;
        rot(q, p) = -s;
        a = rot.transpose() * a * rot;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        v = v * rot;
      }
    }
  }
  SymmetricEigen3 e;
  e.values = a.diagonal();
  e.vectors = v;
  SortDescending(&e);
  MakeRightHanded(&e);
  return e;
}

SymmetricEigen3 DecomposeSymmetric3(const Mat3& a_in) {
  const Mat3 a_sym = 0.5 * (a_in + a_in.transpose());
  const double scale = a_sym.cwiseAbs().maxCoeff();
  SymmetricEigen3 e;
  if (scale == 0.0 || !std::isfinite(scale)) {
    e.values.setConstant(scale == 0.0 ? 0.0 : scale);
    return e;
  }
  const Mat3 a = a_sym / scale;

  const double q = a.trace() / 3.0;
  const Mat3 b = a - q * Mat3::Identity();
  const double p = std::sqrt(b.squaredNorm() / 6.0);
  if (p == 0.0) {
    e.values.setConstant(q * scale);
    return e;
  }
  const double half_det = std::clamp((b / p).determinant() * 0.5, -1.0, 1.0);
  const double angle = std::acos(half_det) / 3.0;
  const double beta0 = 2.0 * std::cos(angle);
  const double beta2 = 2.0 * std::cos(angle + 2.0 * std::numbers::pi / 3.0);
  const double beta1 = -(beta0 + beta2);
  const Vec3 lambda(q + p * beta0, q + p * beta1, q + p * beta2);

  if (lambda[0] - lambda[1] <= kCoincidentEigenvalues ||
      lambda[1] - lambda[2] <= kCoincidentEigenvalues) {
    SymmetricEigen3 j = JacobiSymmetric3(a);
    j.values *= scale;
    return j;
  }

  Vec3 v0, v1, v2;
  if (lambda[0] - lambda[1] >= lambda[1] - lambda[2]) {
    v0 = IsolatedEigenvector(a, lambda[0]);
    v1 = ComplementEigenvector(a, v0, lambda[1]);
    v2 = v0.cross(v1).normalized();
  } else {
    v2 = IsolatedEigenvector(a, lambda[2]);
    v1 = ComplementEigenvector(a, v2, lambda[1]);
    v0 = v1.cross(v2).normalized();
  }
  e.vectors.col(0) = v0;
  e.vectors.col(1) = v1;
  e.vectors.col(2) = v2;
  // Rayleigh quotients are accurate to the square of the vector error, which
  // repairs the closed-form roots when two of them are close.
  for (int i = 0; i < 3; ++i) {
    e.values[i] = e.vectors.col(i).dot(a * e.vectors.col(i)) * scale;
  }
  SortDescending(&e);
  MakeRightHanded(&e);
  return e;
}

PointTensor PointTensor::FromMatrix(const Mat3& tensor) {
  PointTensor t;
  t.tensor = tensor;
  const SymmetricEigen3 e = DecomposeSymmetric3(tensor);
  t.eigenvalues = e.values;
  t.eigenvectors = e.vectors;
  return t;
}

TensorComponents SplitComponents(const PointTensor& t) {
  const Vec3& l = t.eigenvalues;
  const Vec3 e1 = t.eigenvectors.col(0);
  const Vec3 e2 = t.eigenvectors.col(1);
  const Vec3 e3 = t.eigenvectors.col(2);
  const Mat3 p1 = e1 * e1.transpose();
  const Mat3 p12 = p1 + e2 * e2.transpose();
  const Mat3 p123 = p12 + e3 * e3.transpose();
  return TensorComponents{(l[0] - l[1]) * p1, (l[1] - l[2]) * p12, l[2] * p123};
}

void VotingParams::Validate() const {
  if (!(sigma > 0.0) || !(radius > 0.0) || min_neighbors < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "voting parameters require sigma > 0, radius > 0, min_neighbors >= 3");
  }
}

Vec3 CanonicalizeSign(const Vec3& v) {
  int largest = 0;
  v.cwiseAbs().maxCoeff(&largest);
  return v[largest] < 0.0 ? Vec3(-v) : v;
}

double Decay(double squared_distance, double sigma) {
  return std::exp(-squared_distance / (sigma * sigma));
}

namespace {

std::optional<PointTensor> TryAccumulate(int index, const PointCloud& cloud,
                                         const VoxelGrid& grid, const VotingParams& params,
                                         std::vector<int>* scratch) {
  const Vec3& votee = cloud.points[index];
  grid.RadiusSearch(votee, params.radius, scratch);

  // Offsets are taken relative to the votee to keep the sums well scaled.
  double weight_sum = 0.0;
  Vec3 weighted_offset = Vec3::Zero();
  int count = 0;
  for (int i : *scratch) {
    if (i == index) continue;
    const Vec3 d = cloud.points[i] - votee;
    const double w = Decay(d.squaredNorm(), params.sigma);
    weight_sum += w;
    weighted_offset += w * d;
    ++count;
  }
  if (count < params.min_neighbors || !(weight_sum > 0.0)) return std::nullopt;

  const Vec3 mean = weighted_offset / weight_sum;
  Mat3 tensor = Mat3::Zero();
  for (int i : *scratch) {
    if (i == index) continue;
    const Vec3 d = cloud.points[i] - votee;
    const double w = Decay(d.squaredNorm(), params.sigma);
    const Vec3 c = d - mean;
    tensor.noalias() += w * c * c.transpose();
  }
  tensor /= weight_sum;
  // Exact symmetry regardless of accumulation rounding.
  tensor = 0.5 * (tensor + tensor.transpose()).eval();
  return PointTensor::FromMatrix(tensor);
}

}  // namespace

PointTensor AccumulateTensor(int index, const PointCloud& cloud, const VoxelGrid& grid,
                             const VotingParams& params) {
  if (index < 0 || index >= static_cast<int>(cloud.points.size())) {
    throw Error(ErrorCode::kInvalidArgument, "point index out of range");
  }
  std::vector<int> scratch;
  auto t = TryAccumulate(index, cloud, grid, params, &scratch);
  if (!t) {
    throw Error(ErrorCode::kInsufficientNeighbors,
                "point " + std::to_string(index) + " has too few neighbors");
  }
  return *t;
}

PointTensor AccumulateTensor(int index, const PointCloud& cloud, const VotingParams& params) {
  params.Validate();
  const VoxelGrid grid(cloud.points, params.radius);
  return AccumulateTensor(index, cloud, grid, params);
}

SaliencyLabel Classify(const PointTensor& t) {
  const double l1 = t.eigenvalues[0];
  const double l2 = t.eigenvalues[1];
  const double l3 = t.eigenvalues[2];
  const double stick = l1 - l2;
  const double plate = l2 - l3;
  if (stick >= plate && stick >= l3) {
    return {Saliency::kStick, CanonicalizeSign(t.eigenvectors.col(0).normalized())};
  }
  if (plate >= stick && plate >= l3) {
    return {Saliency::kPlate, CanonicalizeSign(t.eigenvectors.col(2).normalized())};
  }
  return {Saliency::kBall, Vec3::Zero()};
}

std::vector<LabeledPoint> LabelCloud(const PointCloud& cloud, const VotingParams& params,
                                     int workers, bool require_plate) {
  params.Validate();
  if (cloud.points.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "point cloud is empty");
  }
  const int n = static_cast<int>(cloud.points.size());
  const VoxelGrid grid(cloud.points, params.radius);

  std::vector<std::optional<SaliencyLabel>> slots(n);
  auto run_range = [&](int begin, int end) {
    std::vector<int> scratch;
    for (int i = begin; i < end; ++i) {
      if (auto t = TryAccumulate(i, cloud, grid, params, &scratch)) slots[i] = Classify(*t);
    }
  };

  workers = std::clamp(workers, 1, std::max(1, n));
  if (workers == 1) {
    run_range(0, n);
  } else {
    std::vector<std::thread> threads;
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(n, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(run_range, begin, end);
    }
    for (auto& t : threads) t.join();
  }

  std::vector<LabeledPoint> labels;
  bool any_plate = false;
  for (int i = 0; i < n; ++i) {
    if (!slots[i]) continue;
    any_plate = any_plate || slots[i]->saliency == Saliency::kPlate;
    labels.push_back({i, *slots[i]});
  }
  if (require_plate && !any_plate) {
    throw Error(ErrorCode::kEmptyResult, "no point classified as plate");
  }
  return labels;
}

}  // namespace planeloc
