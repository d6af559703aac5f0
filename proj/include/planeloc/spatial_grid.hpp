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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "planeloc/geometry.hpp"

namespace planeloc {

// Uniform voxel hash over a fixed point set. Radius queries visit cells in a
// fixed lexicographic order and points within a cell in insertion order, so
// the returned neighbor sequence is deterministic.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(std::span<const Vec3> points, double cell_size);

  double cell_size() const { return cell_size_; }
  std::size_t size() const { return points_.size(); }
  const Vec3& point(int index) const { return points_[index]; }

  // Indices of points within `radius` (inclusive) of `query`.
  void RadiusSearch(const Vec3& query, double radius, std::vector<int>* out) const;

  // True if any point lies within `radius` of `query`.
  bool AnyWithin(const Vec3& query, double radius) const;

 private:
  using Key = std::array<std::int64_t, 3>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  Key KeyOf(const Vec3& p) const;

  template <typename Visitor>
  void VisitCells(const Vec3& query, double radius, Visitor&& visit) const;

  std::vector<Vec3> points_;
  double cell_size_ = 1.0;
  std::unordered_map<Key, std::vector<int>, KeyHash> cells_;
};

}  // namespace planeloc
