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

#include "planeloc/plane_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "planeloc/error.hpp"
#include "planeloc/random.hpp"

namespace planeloc {
namespace {

constexpr int kMaxReseeds = 3;

double DegToRad(double deg) { return deg * std::numbers::pi / 180.0; }

int NearestCentroid(const Vec3& x, const std::vector<Vec3>& centroids, double* dist2) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(centroids.size()); ++c) {
    const double d = (x - centroids[c]).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  *dist2 = best_d;
  return best;
}

std::vector<Vec3> SeedPlusPlus(std::span<const Vec3> x, int k, Random& rng) {
  const int n = static_cast<int>(x.size());
  std::vector<Vec3> centroids;
  centroids.push_back(x[std::min(n - 1, static_cast<int>(rng.Uniform01() * n))]);
  std::vector<double> d2(n);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double d;
      NearestCentroid(x[i], centroids, &d);
      d2[i] = d;
      total += d;
    }
    int pick = n - 1;
    if (total > 0.0) {
      const double target = rng.Uniform01() * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::min(n - 1, static_cast<int>(rng.Uniform01() * n));
    }
    centroids.push_back(x[pick]);
  }
  return centroids;
}

}  // namespace

KMeansResult KMeansNormals(std::span<const Vec3> normals, int k, std::uint64_t seed,
                           int max_iters) {
  if (k < 1 || normals.empty() || max_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "k-means requires k >= 1, max_iters >= 1 and a non-empty input");
  }
  const int n = static_cast<int>(normals.size());
  k = std::min(k, n);
  Random rng(seed);
  std::vector<Vec3> centroids = SeedPlusPlus(normals, k, rng);

  KMeansResult result;
  std::vector<int> assignment(n, -1);
  std::vector<double> dist2(n, 0.0);
  int reseeds = 0;
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double objective = 0.0;
    for (int i = 0; i < n; ++i) {
      const int c = NearestCentroid(normals[i], centroids, &dist2[i]);
      changed = changed || c != assignment[i];
      assignment[i] = c;
      objective += dist2[i];
    }
    result.objective.push_back(objective);
    result.iterations = iter + 1;
    if (!changed) break;

    std::vector<Vec3> sums(k, Vec3::Zero());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums[assignment[i]] += normals[i];
      ++counts[assignment[i]];
    }
    bool reseeded = false;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        if (reseeds >= kMaxReseeds) {
          result.warning = true;
          continue;
        }
        // Move the empty centroid onto the worst-served point.
        const int far = static_cast<int>(
            std::max_element(dist2.begin(), dist2.end()) - dist2.begin());
        centroids[c] = normals[far];
        dist2[far] = 0.0;
        ++reseeds;
        reseeded = true;
        continue;
      }
      const double norm = sums[c].norm();
      if (norm > 0.0) centroids[c] = sums[c] / norm;
    }
    if (result.warning && !reseeded) break;
  }

  result.clusters.resize(k);
  for (int c = 0; c < k; ++c) result.clusters[c].centroid = centroids[c];
  for (int i = 0; i < n; ++i) result.clusters[assignment[i]].members.push_back(i);
  return result;
}

std::vector<std::vector<int>> SplitByOffset(std::span<const Vec3> points, const Vec3& normal,
                                            double gap) {
  if (!(gap > 0.0)) throw Error(ErrorCode::kInvalidArgument, "offset gap must be positive");
  const int n = static_cast<int>(points.size());
  std::vector<double> offset(n);
  for (int i = 0; i < n; ++i) offset[i] = -normal.dot(points[i]);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return offset[a] < offset[b]; });

  std::vector<std::vector<int>> subsets;
  for (int j = 0; j < n; ++j) {
    if (j == 0 || offset[order[j]] - offset[order[j - 1]] > gap) subsets.emplace_back();
    subsets.back().push_back(order[j]);
  }
  for (auto& s : subsets) std::sort(s.begin(), s.end());
  return subsets;
}

Plane FitPlane(std::span<const Vec3> points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::kDegenerateGeometry, "plane fit needs at least 3 points");
  }
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - centroid;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  const SymmetricEigen3 e = DecomposeSymmetric3(cov);
  const double l1 = e.values[0];
  const double l2 = e.values[1];
  const double l3 = std::max(e.values[2], 0.0);
  if (!(l2 > 1e-12 * std::max(l1, 1e-300)) || l3 >= 0.5 * l2) {
    throw Error(ErrorCode::kDegenerateGeometry, "points are not plane-like");
  }
  Plane plane;
  plane.normal = CanonicalizeSign(e.vectors.col(2).normalized());
  plane.offset = -plane.normal.dot(centroid);
  plane.support_count = static_cast<int>(points.size());
  plane.rms = std::sqrt(l3);
  return plane;
}

void PlaneExtractionParams::Validate() const {
  voting.Validate();
  if (k < 1 || kmeans_max_iters < 1 || min_support < 3 || !(gap > 0.0) ||
      !(angle_thresh_deg > 0.0 && angle_thresh_deg < 90.0) || !(support_cell > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid plane extraction parameters");
  }
}

PlaneMap::PlaneMap(std::vector<Plane> planes) : planes_(std::move(planes)) {
  std::set<int> ids;
  for (const Plane& p : planes_) {
    if (!ids.insert(p.id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate plane id " + std::to_string(p.id));
    }
    if (std::abs(p.normal.norm() - 1.0) > 1e-9) {
      throw Error(ErrorCode::kInvalidArgument, "plane normal is not unit length");
    }
  }
}

PlaneMap::PlaneMap(std::vector<Plane> planes, std::vector<std::vector<Vec3>> support_points,
                   double support_cell)
    : PlaneMap(std::move(planes)) {
  if (support_points.size() != planes_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "support point sets must match planes");
  }
  support_.reserve(planes_.size());
  for (const auto& pts : support_points) support_.emplace_back(pts, support_cell);
}

const Plane* PlaneMap::Find(int id) const {
  for (const Plane& p : planes_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::optional<int> PlaneMap::Associate(const Vec3& point, double dist_thresh,
                                       const std::optional<Vec3>& normal_check,
                                       double angle_thresh_deg) const {
  if (!(dist_thresh > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "association distance must be positive");
  }
  const double cos_thresh = std::cos(DegToRad(angle_thresh_deg));
  std::optional<int> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < planes_.size(); ++i) {
    const Plane& plane = planes_[i];
    const double d = std::abs(plane.SignedDistance(point));
    if (d > dist_thresh || d >= best_dist) continue;
    if (normal_check && std::abs(plane.normal.dot(normal_check->normalized())) < cos_thresh) {
      continue;
    }
    if (!support_.empty() && !support_[i].AnyWithin(point, dist_thresh)) continue;
    best = plane.id;
    best_dist = d;
  }
  return best;
}

PlaneMap BuildPlaneMap(const PointCloud& cloud, const PlaneExtractionParams& params,
                       std::uint64_t seed) {
  params.Validate();
  if (cloud.points.empty()) throw Error(ErrorCode::kInvalidArgument, "point cloud is empty");

  const std::vector<LabeledPoint> labels = LabelCloud(cloud, params.voting, params.workers);
  std::vector<int> plate_index;
  std::vector<Vec3> plate_normal;
  for (const LabeledPoint& l : labels) {
    if (l.label.saliency != Saliency::kPlate) continue;
    plate_index.push_back(l.index);
    plate_normal.push_back(l.label.orientation);
  }

  const KMeansResult km =
      KMeansNormals(plate_normal, params.k, seed, params.kmeans_max_iters);

  // k usually exceeds the number of distinct directions; clusters whose
  // centroids are (anti)parallel within the angle threshold describe the same
  // orientation and are merged before offset splitting.
  const double cos_thresh = std::cos(DegToRad(params.angle_thresh_deg));
  const int nc = static_cast<int>(km.clusters.size());
  std::vector<int> parent(nc);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int c) {
    while (parent[c] != c) c = parent[c] = parent[parent[c]];
    return c;
  };
  for (int a = 0; a < nc; ++a) {
    for (int b = a + 1; b < nc; ++b) {
      if (km.clusters[a].members.empty() || km.clusters[b].members.empty()) continue;
      if (std::abs(km.clusters[a].centroid.dot(km.clusters[b].centroid)) >= cos_thresh) {
        parent[find(b)] = find(a);
      }
    }
  }

  std::vector<Plane> planes;
  std::vector<std::vector<Vec3>> support;
  for (int root = 0; root < nc; ++root) {
    if (find(root) != root) continue;
    const Vec3 reference = km.clusters[root].centroid;
    std::vector<int> members;
    Vec3 sum = Vec3::Zero();
    for (int c = 0; c < nc; ++c) {
      if (find(c) != root) continue;
      for (int m : km.clusters[c].members) {
        members.push_back(m);
        const Vec3& nm = plate_normal[m];
        sum += nm.dot(reference) >= 0.0 ? nm : Vec3(-nm);
      }
    }
    if (static_cast<int>(members.size()) < params.min_support || sum.norm() == 0.0) continue;
    std::sort(members.begin(), members.end());
    const Vec3 direction = sum.normalized();

    std::vector<Vec3> points;
    for (int m : members) {
      if (std::abs(plate_normal[m].dot(direction)) >= cos_thresh) {
        points.push_back(cloud.points[plate_index[m]]);
      }
    }

    for (const auto& subset : SplitByOffset(points, direction, params.gap)) {
      if (static_cast<int>(subset.size()) < params.min_support) continue;
      std::vector<Vec3> subset_points;
      subset_points.reserve(subset.size());
      for (int i : subset) subset_points.push_back(points[i]);
      try {
        Plane plane = FitPlane(subset_points);
        planes.push_back(plane);
        support.push_back(std::move(subset_points));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateGeometry) throw;
      }
    }
  }

  // Clusters straddling an edge between two surfaces can refit onto a plane
  // that another cluster already produced. Fold such duplicates into the
  // better supported plane, taking only the points that agree with it.
  std::vector<int> order(planes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return support[a].size() > support[b].size();
  });
  std::vector<bool> alive(planes.size(), true);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const int i = order[oi];
    if (!alive[i]) continue;
    const double inlier = 3.0 * planes[i].rms;
    bool grew = false;
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const int j = order[oj];
      if (!alive[j] || std::abs(planes[i].normal.dot(planes[j].normal)) < cos_thresh) continue;
      Vec3 centroid = Vec3::Zero();
      for (const Vec3& p : support[j]) centroid += p;
      centroid /= static_cast<double>(support[j].size());
      if (std::abs(planes[i].SignedDistance(centroid)) > params.gap) continue;
      alive[j] = false;
      for (const Vec3& p : support[j]) {
        if (std::abs(planes[i].SignedDistance(p)) <= inlier) {
          support[i].push_back(p);
          grew = true;
        }
      }
    }
    if (grew) planes[i] = FitPlane(support[i]);
  }

  // A strip of points along the edge between two surfaces can also yield a
  // plane of its own. Drop planes whose support is mostly explained by a
  // better supported plane.
  for (std::size_t oj = 0; oj < order.size(); ++oj) {
    const int j = order[oj];
    if (!alive[j]) continue;
    int explained = 0;
    for (const Vec3& p : support[j]) {
      for (std::size_t oi = 0; oi < oj; ++oi) {
        const int i = order[oi];
        if (alive[i] && std::abs(planes[i].SignedDistance(p)) <= 3.0 * planes[i].rms) {
          ++explained;
          break;
        }
      }
    }
    if (2 * explained > static_cast<int>(support[j].size())) alive[j] = false;
  }

  std::vector<Plane> kept;
  std::vector<std::vector<Vec3>> kept_support;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    if (!alive[i]) continue;
    kept.push_back(planes[i]);
    kept_support.push_back(std::move(support[i]));
  }
  if (kept.empty()) throw Error(ErrorCode::kEmptyResult, "no plane survived extraction");
  for (int i = 0; i < static_cast<int>(kept.size()); ++i) kept[i].id = i;
  return PlaneMap(std::move(kept), std::move(kept_support), params.support_cell);
}

}  // namespace planeloc
