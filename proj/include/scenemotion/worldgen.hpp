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
#include <optional>
#include <random>
#include <vector>

#include "scenemotion/collision.hpp"
#include "scenemotion/scene_geometry.hpp"
#include "scenemotion/skeleton.hpp"

namespace scenemotion {

/// Axis-aligned box in world coordinates (metres, y up, floor at y = 0).
struct Box {
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;
};

/// Room interior [x0, x1] x [0, height] x [z0, z1] plus obstacle boxes.
struct Room {
  double x0 = -2.5, x1 = 2.5;
  double z0 = 0.0, z1 = 6.0;
  double height = 3.0;
  std::vector<Box> obstacles;
};

/// Camera placement. Camera axes: x right, y down, z forward.
struct CameraPose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d world_from_camera = Eigen::Matrix3d::Identity();

  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const;
  Eigen::Vector3d to_world(const Eigen::Vector3d& camera) const;
  /// Looking along +z (world), pitched down by `pitch` radians.
  static CameraPose looking_into_room(const Eigen::Vector3d& position, double pitch);
};

struct SceneConfig {
  int image_height = 128;
  int image_width = 256;
  /// Focal length as a fraction of the image width.
  double focal_ratio = 0.6;
  double room_width_min = 4.0, room_width_max = 6.0;
  double room_depth_min = 6.0, room_depth_max = 8.0;
  double room_height_min = 2.6, room_height_max = 3.2;
  int obstacles_min = 0, obstacles_max = 4;
  double camera_height_min = 1.6, camera_height_max = 2.2;
  double camera_pitch_min_deg = 15.0, camera_pitch_max_deg = 25.0;
  /// Overrides for fully specified cameras (tests, fixtures).
  std::optional<double> camera_height;
  std::optional<double> camera_pitch_deg;
  /// The collision point cloud is back-projected from a depth render this
  /// many times denser than the image, then subsampled by cloud_stride.
  int cloud_supersample = 4;
  int cloud_stride = 2;

  void validate() const;
};

struct SyntheticScene {
  Room room;
  CameraPose pose;
  CameraIntrinsics intrinsics;
  torch::Tensor image;  // (3, H, W) float in [0, 1]
  DepthMap depth;       // (H, W) double
  PointCloud cloud;
};

/// Nearest positive hit along a world-space ray against the room shell and
/// the obstacles; returns the ray parameter and the surface normal.
struct RayHit {
  double t = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  int surface = 0;  // 0 floor, 1 ceiling, 2 wall, 3 obstacle
};
std::optional<RayHit> cast_ray(const Room& room, const Eigen::Vector3d& origin,
                               const Eigen::Vector3d& direction);

/// Renders depth (z in camera frame) for every pixel of `cam`.
DepthMap render_depth(const Room& room, const CameraPose& pose, const CameraIntrinsics& cam);

SyntheticScene generate_scene(uint64_t seed, const SceneConfig& cfg);
/// Renders a fully specified room and camera (no randomness).
SyntheticScene render_scene(const Room& room, const CameraPose& pose, const SceneConfig& cfg);

struct WalkConfig {
  int frames = 16;
  /// Speed cap, metres per frame.
  double alpha = 0.04;
  /// Clearance added around obstacles and walls during planning.
  double inflate = 0.3;
  double grid_cell = 0.1;
  /// Nearest allowed joint depth in front of the camera.
  double min_depth = 1.5;
  /// Radius that the finished walk must clear against the scene cloud.
  double clearance_radius = 0.06;
  int max_attempts = 200;
};

/// A collision-free walk in camera coordinates, (3, J, T) double.
torch::Tensor generate_walk(const SyntheticScene& scene, const SkeletonGraph& graph,
                            uint64_t seed, const WalkConfig& cfg = {});

/// Same, reusing a prebuilt grid over `scene.cloud`.
torch::Tensor generate_walk(const SyntheticScene& scene, const PointGrid& grid,
                            const SkeletonGraph& graph, uint64_t seed, const WalkConfig& cfg);

/// Root path in world (x, z) for a walk; exposed for tests.
std::vector<Eigen::Vector2d> plan_floor_path(const Room& room, const Eigen::Vector2d& start,
                                             const Eigen::Vector2d& goal, const WalkConfig& cfg);

/// World-space joints of the procedural gait at one instant: root at
/// (x, z) on the floor, facing `heading` (radians, 0 = +z), gait phase `phase`.
std::vector<Eigen::Vector3d> gait_pose(const Eigen::Vector2d& root_xz, double heading,
                                       double phase);

}  // namespace scenemotion
