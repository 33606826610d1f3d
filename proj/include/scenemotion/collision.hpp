// Copyright 2026 The scenemotion Authors
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

#include <Eigen/Core>
#include <torch/torch.h>

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "scenemotion/scene_geometry.hpp"
#include "scenemotion/skeleton.hpp"

namespace scenemotion {

/// Point test for the capsule-free cylinder around segment ab: the projection
/// parameter lies in [0, 1] and the perpendicular distance is at most r.
/// A degenerate segment (a == b) tests the ball of radius r.
bool point_in_cylinder(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double r,
                       const Eigen::Vector3d& p);

/// Brute-force count over the whole cloud.
int64_t point_in_cylinder_count(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double r,
                                const PointCloud& cloud);

/// Uniform hash grid over a point cloud. Queries visit only cells overlapping
/// the cylinder's bounding box and apply the exact same point test, so counts
/// match the brute-force version.
class PointGrid {
 public:
  explicit PointGrid(const PointCloud& cloud, double cell = 0.1);

  const PointCloud& cloud() const { return cloud_; }
  int64_t count(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double r) const;
  /// Calls fn(index) for each point inside the cylinder.
  template <typename Fn>
  void for_each_inside(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double r, Fn&& fn) const;

 private:
  using Key = std::int64_t;
  Key key(int64_t i, int64_t j, int64_t k) const;
  Eigen::Array3i cell_of(const Eigen::Vector3d& p) const;

  PointCloud cloud_;
  double cell_;
  Eigen::Array3i lo_cell_ = Eigen::Array3i::Zero();
  Eigen::Array3i hi_cell_ = Eigen::Array3i::Constant(-1);
  std::unordered_map<Key, std::vector<int32_t>> cells_;
};

struct CollisionOptions {
  /// Count each scene point at most once per motion instead of once per
  /// (bone, frame) incidence.
  bool unique_points = false;
};

/// Sum over frames and bones of points inside each bone cylinder.
/// joints: (3, J, T) camera-frame motion.
int64_t motion_collision_count(const torch::Tensor& joints, const SkeletonGraph& graph, double r,
                               const PointGrid& grid, CollisionOptions opts = {});
int64_t motion_collision_count(const torch::Tensor& joints, const SkeletonGraph& graph, double r,
                               const PointCloud& cloud, CollisionOptions opts = {});

template <typename Fn>
void PointGrid::for_each_inside(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double r,
                                Fn&& fn) const {
  if (cloud_.points.empty()) return;
  const Eigen::Vector3d lo = a.cwiseMin(b).array() - r;
  const Eigen::Vector3d hi = a.cwiseMax(b).array() + r;
  // One extra cell on each side absorbs rounding in cell_of.
  const Eigen::Array3i c0 = (cell_of(lo) - 1).max(lo_cell_);
  const Eigen::Array3i c1 = (cell_of(hi) + 1).min(hi_cell_);
  if ((c1 < c0).any()) return;
  const Eigen::Array3d extent = (c1 - c0 + 1).cast<double>();
  if (extent.prod() > static_cast<double>(cloud_.points.size())) {
    // Huge query box relative to the cloud: a linear scan is cheaper.
    for (size_t idx = 0; idx < cloud_.points.size(); ++idx) {
      if (point_in_cylinder(a, b, r, cloud_.points[idx])) fn(static_cast<int32_t>(idx));
    }
    return;
  }
  for (int i = c0.x(); i <= c1.x(); ++i) {
    for (int j = c0.y(); j <= c1.y(); ++j) {
      for (int k = c0.z(); k <= c1.z(); ++k) {
        auto it = cells_.find(key(i, j, k));
        if (it == cells_.end()) continue;
        for (int32_t idx : it->second) {
          if (point_in_cylinder(a, b, r, cloud_.points[idx])) fn(idx);
        }
      }
    }
  }
}

}  // namespace scenemotion
