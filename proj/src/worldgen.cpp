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

#include "scenemotion/worldgen.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "scenemotion/error.hpp"

namespace scenemotion {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kStrideLength = 1.2;
constexpr int kSceneAttempts = 100;
constexpr double kMinWalkableArea = 1.0;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Slab test; returns the entry parameter and axis, or nullopt.
std::optional<std::pair<double, int>> box_entry(const Box& box, const Eigen::Vector3d& o,
                                                const Eigen::Vector3d& d) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int axis = -1;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < box.lo[a] || o[a] > box.hi[a]) return std::nullopt;
      continue;
    }
    double t0 = (box.lo[a] - o[a]) / d[a];
    double t1 = (box.hi[a] - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_near) {
      t_near = t0;
      axis = a;
    }
    t_far = std::min(t_far, t1);
  }
  if (axis < 0 || t_near > t_far || t_near <= 1e-12) return std::nullopt;
  return std::make_pair(t_near, axis);
}

Eigen::Vector3d rotate_heading(const Eigen::Vector3d& local, double heading) {
  const double c = std::cos(heading), s = std::sin(heading);
  // Local x lateral, y up, z forward; heading 0 faces world +z.
  return {c * local.x() + s * local.z(), local.y(), -s * local.x() + c * local.z()};
}

CameraIntrinsics intrinsics_for(const SceneConfig& cfg) {
  const double f = cfg.focal_ratio * cfg.image_width;
  return {f, f, 0.5 * cfg.image_width, 0.5 * cfg.image_height, cfg.image_width, cfg.image_height};
}

double walkable_area(const Room& room, const CameraPose& pose, const CameraIntrinsics& intrinsics);

}  // namespace

Eigen::Vector3d CameraPose::to_camera(const Eigen::Vector3d& world) const {
  return world_from_camera.transpose() * (world - position);
}

Eigen::Vector3d CameraPose::to_world(const Eigen::Vector3d& camera) const {
  return world_from_camera * camera + position;
}

CameraPose CameraPose::looking_into_room(const Eigen::Vector3d& position, double pitch) {
  const Eigen::Vector3d forward(0.0, -std::sin(pitch), std::cos(pitch));
  const Eigen::Vector3d down(0.0, -std::cos(pitch), -std::sin(pitch));
  const Eigen::Vector3d right = down.cross(forward);
  CameraPose pose;
  pose.position = position;
  pose.world_from_camera.col(0) = right;
  pose.world_from_camera.col(1) = down;
  pose.world_from_camera.col(2) = forward;
  return pose;
}

void SceneConfig::validate() const {
  if (image_height <= 0 || image_width <= 0)
    throw ConfigError("scene config: image size must be positive");
  if (focal_ratio <= 0.0) throw ConfigError("scene config: focal_ratio must be positive");
  if (room_width_min <= 0.0 || room_depth_min <= 0.0 || room_height_min <= 0.0 ||
      room_width_max < room_width_min || room_depth_max < room_depth_min ||
      room_height_max < room_height_min)
    throw ConfigError("scene config: room extents must be positive with min <= max");
  if (obstacles_min < 0 || obstacles_max > 4 || obstacles_max < obstacles_min)
    throw ConfigError("scene config: obstacle count must lie in [0, 4]");
  if (cloud_supersample < 1 || cloud_stride < 1)
    throw ConfigError("scene config: cloud sampling factors must be >= 1");
}

std::optional<RayHit> cast_ray(const Room& room, const Eigen::Vector3d& o,
                               const Eigen::Vector3d& d) {
  const Eigen::Vector3d lo(room.x0, 0.0, room.z0);
  const Eigen::Vector3d hi(room.x1, room.height, room.z1);
  if ((o.array() <= lo.array()).any() || (o.array() >= hi.array()).any()) return std::nullopt;

  RayHit hit;
  hit.t = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) continue;
    const double t = ((d[a] > 0.0 ? hi[a] : lo[a]) - o[a]) / d[a];
    if (t < hit.t) {
      hit.t = t;
      hit.normal = Eigen::Vector3d::Zero();
      hit.normal[a] = d[a] > 0.0 ? -1.0 : 1.0;
      hit.surface = a == 1 ? (d[a] < 0.0 ? 0 : 1) : 2;
    }
  }
  if (!std::isfinite(hit.t)) return std::nullopt;
  for (const Box& box : room.obstacles) {
    auto entry = box_entry(box, o, d);
    if (entry && entry->first < hit.t) {
      hit.t = entry->first;
      hit.normal = Eigen::Vector3d::Zero();
      hit.normal[entry->second] = d[entry->second] > 0.0 ? -1.0 : 1.0;
      hit.surface = 3;
    }
  }
  return hit;
}

namespace {

// Renders depth and, when `shade` is given, normal shading into it.
DepthMap render(const Room& room, const CameraPose& pose, const CameraIntrinsics& cam,
                torch::Tensor* shade) {
  auto depth = torch::zeros({cam.height, cam.width}, torch::kFloat64);
  auto valid = torch::zeros({cam.height, cam.width}, torch::kBool);
  auto da = depth.accessor<double, 2>();
  auto va = valid.accessor<bool, 2>();
  float* sp = shade ? shade->data_ptr<float>() : nullptr;
  static const double albedo[4] = {0.55, 0.9, 0.75, 0.4};
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      // Camera-frame direction with unit z, so the ray parameter is depth.
      const Eigen::Vector3d dc((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0);
      const Eigen::Vector3d dw = pose.world_from_camera * dc;
      auto hit = cast_ray(room, pose.position, dw);
      if (!hit) continue;
      da[v][u] = hit->t;
      va[v][u] = true;
      if (sp) {
        const double lambert = std::abs(hit->normal.dot(dw.normalized()));
        sp[v * cam.width + u] = static_cast<float>(albedo[hit->surface] * (0.25 + 0.75 * lambert));
      }
    }
  }
  return DepthMap{depth, valid};
}

void check_room(const Room& room) {
  if (!(room.x1 > room.x0) || !(room.z1 > room.z0) || !(room.height > 0.0))
    throw ConfigError("scene: room extents must be positive");
  for (const Box& b : room.obstacles) {
    if ((b.hi.array() <= b.lo.array()).any())
      throw ConfigError("scene: obstacle box has non-positive extent");
    if (b.lo.x() < room.x0 || b.hi.x() > room.x1 || b.lo.y() < 0.0 || b.hi.y() > room.height ||
        b.lo.z() < room.z0 || b.hi.z() > room.z1)
      throw ConfigError("scene: obstacle box lies outside the room");
  }
}

}  // namespace

DepthMap render_depth(const Room& room, const CameraPose& pose, const CameraIntrinsics& cam) {
  cam.validate();
  return render(room, pose, cam, nullptr);
}

SyntheticScene render_scene(const Room& room, const CameraPose& pose, const SceneConfig& cfg) {
  cfg.validate();
  check_room(room);
  SyntheticScene scene;
  scene.room = room;
  scene.pose = pose;
  scene.intrinsics = intrinsics_for(cfg);
  auto shade = torch::zeros({cfg.image_height, cfg.image_width}, torch::kFloat32);
  scene.depth = render(room, pose, scene.intrinsics, &shade);
  scene.image = shade.unsqueeze(0).repeat({3, 1, 1}).contiguous();

  const int s = cfg.cloud_supersample;
  const auto& c = scene.intrinsics;
  // Pixel centres sit on integers at both resolutions.
  CameraIntrinsics dense{c.fx * s,          c.fy * s,          c.cx * s + 0.5 * (s - 1),
                         c.cy * s + 0.5 * (s - 1), c.width * s, c.height * s};
  const DepthMap dense_depth = s == 1 ? scene.depth : render(room, pose, dense, nullptr);
  PointCloud local = backproject_depth(dense, dense_depth, cfg.cloud_stride);
  scene.cloud = std::move(local);
  return scene;
}

SyntheticScene generate_scene(uint64_t seed, const SceneConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < kSceneAttempts; ++attempt) {
    Room room;
    const double width = uniform(rng, cfg.room_width_min, cfg.room_width_max);
    const double depth = uniform(rng, cfg.room_depth_min, cfg.room_depth_max);
    room.height = uniform(rng, cfg.room_height_min, cfg.room_height_max);
    room.x0 = -0.5 * width;
    room.x1 = 0.5 * width;
    room.z0 = 0.0;
    room.z1 = depth;

    const double cam_height =
        cfg.camera_height.value_or(uniform(rng, cfg.camera_height_min, cfg.camera_height_max));
    const double pitch_deg = cfg.camera_pitch_deg.value_or(
        uniform(rng, cfg.camera_pitch_min_deg, cfg.camera_pitch_max_deg));
    const double cam_x = uniform(rng, -0.15 * width, 0.15 * width);
    if (!(cam_height > 0.0 && cam_height < room.height))
      throw ConfigError("scene: camera height must lie inside the room");

    const int n_obstacles = uniform_int(rng, cfg.obstacles_min, cfg.obstacles_max);
    for (int i = 0; i < n_obstacles; ++i) {
      const double sx = uniform(rng, 0.4, std::min(1.2, 0.4 * width));
      const double sz = uniform(rng, 0.4, std::min(1.2, 0.3 * depth));
      const double sy = uniform(rng, 0.4, std::min(1.2, room.height));
      const double x = uniform(rng, room.x0, room.x1 - sx);
      const double z = uniform(rng, std::min(2.0, depth - sz), room.z1 - sz);
      room.obstacles.push_back(Box{{x, 0.0, z}, {x + sx, sy, z + sz}});
    }
    auto pose = CameraPose::looking_into_room({cam_x, cam_height, room.z0 + 0.05},
                                              pitch_deg * kPi / 180.0);
    if (walkable_area(room, pose, intrinsics_for(cfg)) >= kMinWalkableArea)
      return render_scene(room, pose, cfg);
  }
  throw ConfigError("scene: no sampled room leaves walkable floor in view after " +
                    std::to_string(kSceneAttempts) + " attempts");
}

std::vector<Eigen::Vector3d> gait_pose(const Eigen::Vector2d& root_xz, double heading,
                                       double phase) {
  const double sp = std::sin(phase), cp = std::cos(phase);
  std::vector<Eigen::Vector3d> local(19);
  const Eigen::Vector3d pelvis(0.0, 0.97 + 0.015 * std::cos(2.0 * phase), 0.0);
  local[0] = pelvis;
  local[1] = pelvis + Eigen::Vector3d(0.0, 0.17, 0.01);
  local[2] = local[1] + Eigen::Vector3d(0.0, 0.17, 0.01);
  local[3] = local[2] + Eigen::Vector3d(0.0, 0.17, 0.01);
  local[4] = local[3] + Eigen::Vector3d(0.0, 0.13, 0.02);

  auto arm = [&](int shoulder, double side, double swing) {
    local[shoulder] = local[2] + Eigen::Vector3d(side * 0.18, 0.11, 0.0);
    const double bend = swing + 0.15 + 0.1 * std::max(0.0, std::sin(swing * 4.0));
    local[shoulder + 1] = local[shoulder] +
                          Eigen::Vector3d(side * 0.02, -0.28 * std::cos(swing), 0.28 * std::sin(swing));
    local[shoulder + 2] = local[shoulder + 1] +
                          Eigen::Vector3d(0.0, -0.25 * std::cos(bend), 0.25 * std::sin(bend));
  };
  arm(5, 1.0, -0.25 * sp);
  arm(8, -1.0, 0.25 * sp);

  auto leg = [&](int hip, double side, double swing, double knee_flex) {
    local[hip] = pelvis + Eigen::Vector3d(side * 0.09, -0.06, 0.0);
    const double shin = swing - knee_flex;
    local[hip + 1] = local[hip] + Eigen::Vector3d(0.0, -0.38 * std::cos(swing), 0.38 * std::sin(swing));
    local[hip + 2] = local[hip + 1] + Eigen::Vector3d(0.0, -0.38 * std::cos(shin), 0.38 * std::sin(shin));
    local[hip + 3] = local[hip + 2] + Eigen::Vector3d(0.0, -0.04, 0.13);
  };
  leg(11, 1.0, 0.3 * sp, 0.5 * std::max(0.0, cp));
  leg(15, -1.0, -0.3 * sp, 0.5 * std::max(0.0, -cp));

  std::vector<Eigen::Vector3d> world(19);
  for (int j = 0; j < 19; ++j) {
    world[j] = rotate_heading(local[j], heading) + Eigen::Vector3d(root_xz.x(), 0.0, root_xz.y());
  }
  return world;
}

namespace {

struct WalkSpace {
  const SyntheticScene& scene;
  const WalkConfig& cfg;

  bool visible(const Eigen::Vector3d& world) const {
    const Eigen::Vector3d c = scene.pose.to_camera(world);
    if (c.z() < cfg.min_depth) return false;
    const auto& k = scene.intrinsics;
    const double u = k.fx * c.x() / c.z() + k.cx;
    const double v = k.fy * c.y() / c.z() + k.cy;
    return u >= 0.0 && u <= k.width - 1 && v >= 0.0 && v <= k.height - 1;
  }

  bool free(const Eigen::Vector2d& q) const {
    const Room& room = scene.room;
    const double m = cfg.inflate;
    if (q.x() < room.x0 + m || q.x() > room.x1 - m || q.y() < room.z0 + m || q.y() > room.z1 - m)
      return false;
    for (const Box& b : room.obstacles) {
      if (q.x() > b.lo.x() - m && q.x() < b.hi.x() + m && q.y() > b.lo.z() - m &&
          q.y() < b.hi.z() + m)
        return false;
    }
    // The whole body envelope must stay in view.
    for (double dx : {-0.4, 0.4}) {
      for (double dz : {-0.4, 0.4}) {
        for (double y : {0.0, 1.8}) {
          if (!visible({q.x() + dx, y, q.y() + dz})) return false;
        }
      }
    }
    return true;
  }

  bool segment_free(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
    const double len = (b - a).norm();
    const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.02)));
    for (int i = 0; i <= steps; ++i) {
      if (!free(a + (b - a) * (static_cast<double>(i) / steps))) return false;
    }
    return true;
  }
};

double walkable_area(const Room& room, const CameraPose& pose, const CameraIntrinsics& intrinsics) {
  SyntheticScene probe;
  probe.room = room;
  probe.pose = pose;
  probe.intrinsics = intrinsics;
  const WalkConfig cfg;
  const WalkSpace space{probe, cfg};
  const double cell = cfg.grid_cell;
  int open = 0;
  for (double x = room.x0 + 0.5 * cell; x < room.x1; x += cell)
    for (double z = room.z0 + 0.5 * cell; z < room.z1; z += cell) open += space.free({x, z});
  return open * cell * cell;
}

std::vector<Eigen::Vector2d> astar(const WalkSpace& space, const Eigen::Vector2d& start,
                                   const Eigen::Vector2d& goal) {
  const Room& room = space.scene.room;
  const double cell = space.cfg.grid_cell;
  const int nx = std::max(1, static_cast<int>(std::floor((room.x1 - room.x0) / cell)));
  const int nz = std::max(1, static_cast<int>(std::floor((room.z1 - room.z0) / cell)));
  auto centre = [&](int i, int k) {
    return Eigen::Vector2d(room.x0 + (i + 0.5) * cell, room.z0 + (k + 0.5) * cell);
  };
  auto snap = [&](const Eigen::Vector2d& q) {
    int i = std::clamp(static_cast<int>((q.x() - room.x0) / cell), 0, nx - 1);
    int k = std::clamp(static_cast<int>((q.y() - room.z0) / cell), 0, nz - 1);
    return std::make_pair(i, k);
  };
  std::vector<char> open_cell(static_cast<size_t>(nx) * nz);
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < nz; ++k) open_cell[i * nz + k] = space.free(centre(i, k));

  auto [si, sk] = snap(start);
  auto [gi, gk] = snap(goal);
  if (!open_cell[si * nz + sk] || !open_cell[gi * nz + gk]) return {};
  if (!space.segment_free(start, centre(si, sk)) || !space.segment_free(centre(gi, gk), goal))
    return {};

  const int n = nx * nz;
  std::vector<double> cost(n, std::numeric_limits<double>::infinity());
  std::vector<int> came(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const int src = si * nz + sk, dst = gi * nz + gk;
  cost[src] = 0.0;
  heap.push({(centre(si, sk) - centre(gi, gk)).norm(), src});
  while (!heap.empty()) {
    auto [f, cur] = heap.top();
    heap.pop();
    if (cur == dst) break;
    const int ci = cur / nz, ck = cur % nz;
    if (f - (centre(ci, ck) - centre(gi, gk)).norm() > cost[cur] + 1e-12) continue;
    for (int di = -1; di <= 1; ++di) {
      for (int dk = -1; dk <= 1; ++dk) {
        if (di == 0 && dk == 0) continue;
        const int ni = ci + di, nk = ck + dk;
        if (ni < 0 || nk < 0 || ni >= nx || nk >= nz) continue;
        const int nb = ni * nz + nk;
        if (!open_cell[nb]) continue;
        // No corner cutting past blocked cells.
        if (di != 0 && dk != 0 && (!open_cell[ni * nz + ck] || !open_cell[ci * nz + nk])) continue;
        const double c = cost[cur] + cell * std::sqrt(static_cast<double>(di * di + dk * dk));
        if (c < cost[nb]) {
          cost[nb] = c;
          came[nb] = cur;
          heap.push({c + (centre(ni, nk) - centre(gi, gk)).norm(), nb});
        }
      }
    }
  }
  if (src != dst && came[dst] < 0) return {};
  std::vector<Eigen::Vector2d> cells;
  for (int c = dst; c != -1; c = came[c]) cells.push_back(centre(c / nz, c % nz));
  std::reverse(cells.begin(), cells.end());

  std::vector<Eigen::Vector2d> raw = {start};
  raw.insert(raw.end(), cells.begin(), cells.end());
  raw.push_back(goal);
  // String pulling: jump to the farthest point still reachable in a line.
  std::vector<Eigen::Vector2d> path = {start};
  size_t at = 0;
  while (at + 1 < raw.size()) {
    size_t next = at + 1;
    for (size_t j = raw.size() - 1; j > at + 1; --j) {
      if (space.segment_free(raw[at], raw[j])) {
        next = j;
        break;
      }
    }
    path.push_back(raw[next]);
    at = next;
  }
  return path;
}

double path_length(const std::vector<Eigen::Vector2d>& path) {
  double len = 0.0;
  for (size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

Eigen::Vector2d point_at(const std::vector<Eigen::Vector2d>& path, double s) {
  if (s <= 0.0) return path.front();
  for (size_t i = 1; i < path.size(); ++i) {
    const double seg = (path[i] - path[i - 1]).norm();
    if (s <= seg && seg > 0.0) return path[i - 1] + (path[i] - path[i - 1]) * (s / seg);
    s -= seg;
  }
  return path.back();
}

}  // namespace

std::vector<Eigen::Vector2d> plan_floor_path(const Room& room, const Eigen::Vector2d& start,
                                             const Eigen::Vector2d& goal, const WalkConfig& cfg) {
  // Planning without a camera: every floor point counts as visible.
  SyntheticScene blind;
  blind.room = room;
  blind.pose = CameraPose::looking_into_room({0.0, 1.0, room.z0 - 1e6}, 0.0);
  blind.intrinsics = CameraIntrinsics{1e-9, 1e-9, 0.5, 0.5, 2, 2};
  WalkConfig c = cfg;
  c.min_depth = 0.0;
  WalkSpace space{blind, c};
  if (space.segment_free(start, goal)) return {start, goal};
  return astar(space, start, goal);
}

torch::Tensor generate_walk(const SyntheticScene& scene, const SkeletonGraph& graph,
                            uint64_t seed, const WalkConfig& cfg) {
  PointGrid grid(scene.cloud, 0.1);
  return generate_walk(scene, grid, graph, seed, cfg);
}

torch::Tensor generate_walk(const SyntheticScene& scene, const PointGrid& grid,
                            const SkeletonGraph& graph, uint64_t seed, const WalkConfig& cfg) {
  if (graph.joint_count() != 19) throw ValidationError("generate_walk: gait needs the 19-joint body");
  if (cfg.frames < 2) throw ValidationError("generate_walk: need at least 2 frames");
  if (!(cfg.alpha > 0.0)) throw ValidationError("generate_walk: alpha must be positive");
  std::mt19937_64 rng(seed);
  WalkSpace space{scene, cfg};
  const Room& room = scene.room;
  const int T = cfg.frames;

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    Eigen::Vector2d start;
    bool found = false;
    for (int i = 0; i < 2000 && !found; ++i) {
      start = {uniform(rng, room.x0, room.x1), uniform(rng, room.z0, room.z1)};
      found = space.free(start);
    }
    if (!found) break;
    double speed = cfg.alpha * uniform(rng, 0.45, 0.9);
    const double heading = uniform(rng, -kPi, kPi);
    const Eigen::Vector2d goal =
        start + speed * (T - 1) * Eigen::Vector2d(std::sin(heading), std::cos(heading));
    const double phase0 = uniform(rng, 0.0, 2.0 * kPi);

    std::vector<Eigen::Vector2d> path;
    if (space.segment_free(start, goal)) {
      path = {start, goal};
    } else if (space.free(goal)) {
      path = astar(space, start, goal);
      if (path.empty()) continue;
      speed = path_length(path) / (T - 1);
      if (speed > 0.95 * cfg.alpha) continue;
    } else {
      continue;
    }

    auto joints = torch::zeros({3, graph.joint_count(), T}, torch::kFloat64);
    auto acc = joints.accessor<double, 3>();
    for (int t = 0; t < T; ++t) {
      const double s = speed * t;
      const Eigen::Vector2d root = point_at(path, s);
      const Eigen::Vector2d dir = point_at(path, s + 0.1) - point_at(path, s - 0.1);
      const double facing = dir.norm() > 1e-9 ? std::atan2(dir.x(), dir.y()) : heading;
      const double phase = phase0 + 2.0 * kPi * s / kStrideLength;
      const auto world = gait_pose(root, facing, phase);
      for (int j = 0; j < graph.joint_count(); ++j) {
        const Eigen::Vector3d c = scene.pose.to_camera(world[j]);
        for (int a = 0; a < 3; ++a) acc[a][j][t] = c[a];
      }
    }
    if (joints.select(0, 2).min().item<double>() < 0.1) continue;
    if (motion_collision_count(joints, graph, cfg.clearance_radius, grid) != 0) continue;
    return joints;
  }
  throw ValidationError("generate_walk: no feasible collision-free path after " +
                        std::to_string(cfg.max_attempts) + " attempts");
}

}  // namespace scenemotion
