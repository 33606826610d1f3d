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

#include "scenemotion/collision.hpp"

#include <cmath>
#include <unordered_set>

#include "scenemotion/error.hpp"

namespace scenemotion {

bool point_in_cylinder(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double r,
                       const Eigen::Vector3d& p) {
  const Eigen::Vector3d ab = b - a;
  const Eigen::Vector3d ap = p - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return ap.squaredNorm() <= r * r;
  const double s = ap.dot(ab) / len2;
  if (s < 0.0 || s > 1.0) return false;
  return (ap - s * ab).squaredNorm() <= r * r;
}

int64_t point_in_cylinder_count(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double r,
                                const PointCloud& cloud) {
  if (!(r > 0.0)) throw ValidationError("cylinder count: radius must be positive");
  int64_t n = 0;
  for (const auto& p : cloud.points) n += point_in_cylinder(a, b, r, p) ? 1 : 0;
  return n;
}

PointGrid::PointGrid(const PointCloud& cloud, double cell) : cloud_(cloud), cell_(cell) {
  if (!(cell > 0.0)) throw ConfigError("point grid: cell size must be positive");
  for (size_t i = 0; i < cloud_.points.size(); ++i) {
    const auto c = cell_of(cloud_.points[i]);
    cells_[key(c.x(), c.y(), c.z())].push_back(static_cast<int32_t>(i));
    if (i == 0) {
      lo_cell_ = c;
      hi_cell_ = c;
    } else {
      lo_cell_ = lo_cell_.min(c);
      hi_cell_ = hi_cell_.max(c);
    }
  }
}

PointGrid::Key PointGrid::key(int64_t i, int64_t j, int64_t k) const {
  // 21 bits per axis, offset to stay non-negative.
  constexpr int64_t kOff = 1 << 20;
  return ((i + kOff) << 42) | ((j + kOff) << 21) | (k + kOff);
}

Eigen::Array3i PointGrid::cell_of(const Eigen::Vector3d& p) const {
  constexpr double kLimit = (1 << 20) - 2;
  Eigen::Array3i c;
  for (int k = 0; k < 3; ++k) {
    const double v = std::clamp(std::floor(p[k] / cell_), -kLimit, kLimit);
    c[k] = static_cast<int>(v);
  }
  return c;
}

int64_t PointGrid::count(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double r) const {
  if (!(r > 0.0)) throw ValidationError("cylinder count: radius must be positive");
  int64_t n = 0;
  for_each_inside(a, b, r, [&](int32_t) { ++n; });
  return n;
}

namespace {

Eigen::Vector3d joint_at(const torch::TensorAccessor<double, 3>& acc, int j, int64_t t) {
  return {acc[0][j][t], acc[1][j][t], acc[2][j][t]};
}

}  // namespace

int64_t motion_collision_count(const torch::Tensor& joints, const SkeletonGraph& graph, double r,
                               const PointGrid& grid, CollisionOptions opts) {
  if (!(r > 0.0)) throw ValidationError("motion collision: radius must be positive");
  if (joints.dim() != 3 || joints.size(0) != 3 || joints.size(1) != graph.joint_count())
    throw ValidationError("motion collision: expected (3, J, T) joints matching the skeleton");
  auto x = joints.detach().to(torch::kDouble).contiguous();
  auto acc = x.accessor<double, 3>();
  int64_t total = 0;
  std::unordered_set<int32_t> seen;
  for (int64_t t = 0; t < x.size(2); ++t) {
    for (const auto& [i, j] : graph.bones()) {
      const auto a = joint_at(acc, i, t);
      const auto b = joint_at(acc, j, t);
      if (opts.unique_points) {
        grid.for_each_inside(a, b, r, [&](int32_t idx) { seen.insert(idx); });
      } else {
        total += grid.count(a, b, r);
      }
    }
  }
  return opts.unique_points ? static_cast<int64_t>(seen.size()) : total;
}

int64_t motion_collision_count(const torch::Tensor& joints, const SkeletonGraph& graph, double r,
                               const PointCloud& cloud, CollisionOptions opts) {
  return motion_collision_count(joints, graph, r, PointGrid(cloud), opts);
}

}  // namespace scenemotion
