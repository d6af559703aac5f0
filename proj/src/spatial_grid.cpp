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

#include "planeloc/spatial_grid.hpp"

#include <cmath>

#include "planeloc/error.hpp"

namespace planeloc {

std::size_t VoxelGrid::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::int64_t v : k) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

VoxelGrid::VoxelGrid(std::span<const Vec3> points, double cell_size)
    : points_(points.begin(), points.end()), cell_size_(cell_size) {
  if (!(cell_size > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "voxel cell size must be positive");
  }
  for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
    cells_[KeyOf(points_[i])].push_back(i);
  }
}

VoxelGrid::Key VoxelGrid::KeyOf(const Vec3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell_size_)),
          static_cast<std::int64_t>(std::floor(p.y() / cell_size_)),
          static_cast<std::int64_t>(std::floor(p.z() / cell_size_))};
}

template <typename Visitor>
void VoxelGrid::VisitCells(const Vec3& query, double radius, Visitor&& visit) const {
  const Key lo = KeyOf(query - Vec3::Constant(radius));
  const Key hi = KeyOf(query + Vec3::Constant(radius));
  for (std::int64_t x = lo[0]; x <= hi[0]; ++x) {
    for (std::int64_t y = lo[1]; y <= hi[1]; ++y) {
      for (std::int64_t z = lo[2]; z <= hi[2]; ++z) {
        auto it = cells_.find(Key{x, y, z});
        if (it == cells_.end()) continue;
        if (!visit(it->second)) return;
      }
    }
  }
}

void VoxelGrid::RadiusSearch(const Vec3& query, double radius, std::vector<int>* out) const {
  out->clear();
  const double r2 = radius * radius;
  VisitCells(query, radius, [&](const std::vector<int>& cell) {
    for (int idx : cell) {
      if ((points_[idx] - query).squaredNorm() <= r2) out->push_back(idx);
    }
    return true;
  });
}

bool VoxelGrid::AnyWithin(const Vec3& query, double radius) const {
  const double r2 = radius * radius;
  bool found = false;
  VisitCells(query, radius, [&](const std::vector<int>& cell) {
    for (int idx : cell) {
      if ((points_[idx] - query).squaredNorm() <= r2) {
        found = true;
        return false;
      }
    }
    return true;
  });
  return found;
}

}  // namespace planeloc
