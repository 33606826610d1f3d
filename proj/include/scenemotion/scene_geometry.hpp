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

#include <vector>

namespace scenemotion {

/// Pinhole intrinsics. Pixel (u, v) = (column, row); pixel centres sit on
/// integer coordinates.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.5;
  double cy = 0.5;
  int width = 1;
  int height = 1;

  void validate() const;
};

/// Metric depth (z along the optical axis) with a validity mask, both (H, W).
struct DepthMap {
  torch::Tensor values;  // double
  torch::Tensor valid;   // bool

  int64_t height() const { return values.size(0); }
  int64_t width() const { return values.size(1); }
  static DepthMap all_valid(torch::Tensor values);
};

struct PointCloud {
  std::vector<Eigen::Vector3d> points;

  size_t size() const { return points.size(); }
  /// (N, 3) double tensor view of the points (copied).
  torch::Tensor as_tensor() const;
  static PointCloud from_tensor(const torch::Tensor& points);
};

/// Projected motion, (..., 2, J, T) in pixels.
struct Motion2D {
  torch::Tensor pixels;
};

Eigen::Vector2d project_point(const CameraIntrinsics& cam, const Eigen::Vector3d& p);
Eigen::Vector3d backproject_pixel(const CameraIntrinsics& cam, double u, double v, double depth);

/// Differentiable per-joint projection of (..., 3, J, T) camera-frame joints.
/// Throws listing every (j, t) with non-positive depth.
Motion2D project_motion(const CameraIntrinsics& cam, const torch::Tensor& joints);

/// Same projection, but depths are clamped to `min_depth` instead of
/// rejected. Used inside training, where a generator may briefly produce
/// joints behind the camera.
Motion2D project_motion_clamped(const CameraIntrinsics& cam, const torch::Tensor& joints,
                                double min_depth = 0.05);

/// Maps pixel coordinates into [-1, 1] by image size (u / W, v / H).
torch::Tensor normalize_pixels(const CameraIntrinsics& cam, const torch::Tensor& pixels);

/// Back-projects every valid pixel on a stride grid (rows and columns
/// 0, stride, 2*stride, ...).
PointCloud backproject_depth(const CameraIntrinsics& cam, const DepthMap& depth, int stride);

}  // namespace scenemotion
