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

#include "scenemotion/scene_geometry.hpp"

#include <sstream>

#include "scenemotion/error.hpp"

namespace scenemotion {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ConfigError("camera: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw ConfigError("camera: image size must be positive");
  if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height))
    throw ConfigError("camera: principal point must lie inside the image");
}

DepthMap DepthMap::all_valid(torch::Tensor values) {
  auto valid = torch::ones(values.sizes(), torch::kBool);
  return {std::move(values), std::move(valid)};
}

torch::Tensor PointCloud::as_tensor() const {
  auto out = torch::empty({static_cast<int64_t>(points.size()), 3}, torch::kDouble);
  auto acc = out.accessor<double, 2>();
  for (size_t i = 0; i < points.size(); ++i) {
    for (int k = 0; k < 3; ++k) acc[i][k] = points[i][k];
  }
  return out;
}

PointCloud PointCloud::from_tensor(const torch::Tensor& points) {
  if (points.dim() != 2 || points.size(1) != 3)
    throw ValidationError("point cloud: expected (N, 3) tensor");
  auto p = points.to(torch::kDouble).contiguous();
  auto acc = p.accessor<double, 2>();
  PointCloud cloud;
  cloud.points.reserve(p.size(0));
  for (int64_t i = 0; i < p.size(0); ++i) cloud.points.emplace_back(acc[i][0], acc[i][1], acc[i][2]);
  return cloud;
}

Eigen::Vector2d project_point(const CameraIntrinsics& cam, const Eigen::Vector3d& p) {
  if (!(p.z() > 0.0)) throw ValidationError("project_point: point is behind the camera (z <= 0)");
  return {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy};
}

Eigen::Vector3d backproject_pixel(const CameraIntrinsics& cam, double u, double v, double depth) {
  return {(u - cam.cx) * depth / cam.fx, (v - cam.cy) * depth / cam.fy, depth};
}

namespace {

torch::Tensor project_impl(const CameraIntrinsics& cam, const torch::Tensor& joints,
                           const torch::Tensor& z) {
  auto x = joints.select(-3, 0);
  auto y = joints.select(-3, 1);
  auto u = x / z * cam.fx + cam.cx;
  auto v = y / z * cam.fy + cam.cy;
  return torch::stack({u, v}, -3);
}

void require_joint_layout(const torch::Tensor& joints) {
  if (joints.dim() < 3 || joints.size(-3) != 3)
    throw ValidationError("project_motion: expected (..., 3, J, T) joints");
}

}  // namespace

Motion2D project_motion(const CameraIntrinsics& cam, const torch::Tensor& joints) {
  require_joint_layout(joints);
  auto z = joints.select(-3, 2);
  auto bad = (z <= 0) | ~torch::isfinite(z);
  if (bad.any().item<bool>()) {
    auto idx = torch::nonzero(bad.reshape({-1, z.size(-2), z.size(-1)}));
    std::ostringstream msg;
    msg << "project_motion: non-positive depth at (j, t):";
    const int64_t shown = std::min<int64_t>(idx.size(0), 16);
    for (int64_t i = 0; i < shown; ++i)
      msg << " (" << idx[i][1].item<int64_t>() << ", " << idx[i][2].item<int64_t>() << ")";
    if (idx.size(0) > shown) msg << " ... " << idx.size(0) << " total";
    throw ValidationError(msg.str());
  }
  return {project_impl(cam, joints, z)};
}

Motion2D project_motion_clamped(const CameraIntrinsics& cam, const torch::Tensor& joints,
                                double min_depth) {
  require_joint_layout(joints);
  auto z = joints.select(-3, 2).clamp_min(min_depth);
  return {project_impl(cam, joints, z)};
}

torch::Tensor normalize_pixels(const CameraIntrinsics& cam, const torch::Tensor& pixels) {
  auto u = pixels.select(-3, 0) * (2.0 / cam.width) - 1.0;
  auto v = pixels.select(-3, 1) * (2.0 / cam.height) - 1.0;
  return torch::stack({u, v}, -3);
}

PointCloud backproject_depth(const CameraIntrinsics& cam, const DepthMap& depth, int stride) {
  if (stride < 1) throw ConfigError("backproject_depth: stride must be >= 1");
  auto values = depth.values.to(torch::kDouble).contiguous();
  auto valid = depth.valid.to(torch::kBool).contiguous();
  auto vacc = values.accessor<double, 2>();
  auto macc = valid.accessor<bool, 2>();
  PointCloud cloud;
  for (int64_t v = 0; v < values.size(0); v += stride) {
    for (int64_t u = 0; u < values.size(1); u += stride) {
      const double d = vacc[v][u];
      if (!macc[v][u] || !(d > 0.0)) continue;
      cloud.points.push_back(backproject_pixel(cam, static_cast<double>(u), static_cast<double>(v), d));
    }
  }
  return cloud;
}

}  // namespace scenemotion
