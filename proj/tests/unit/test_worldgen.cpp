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

#include "doctest_torch.hpp"
#include "fixtures.hpp"
#include "helpers.hpp"
#include "scenemotion/collision.hpp"
#include "scenemotion/error.hpp"
#include "scenemotion/evaluation.hpp"
#include "scenemotion/worldgen.hpp"

using namespace scenemotion;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Standalone slab intersector: exit of the room interior, entry of each box.
double oracle_depth(const Room& room, const Vector3d& o, const Vector3d& d) {
  double best = std::numeric_limits<double>::infinity();
  const double lo[3] = {room.x0, 0.0, room.z0};
  const double hi[3] = {room.x1, room.height, room.z1};
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0) best = std::min(best, (hi[a] - o[a]) / d[a]);
    if (d[a] < 0) best = std::min(best, (lo[a] - o[a]) / d[a]);
  }
  for (const auto& b : room.obstacles) {
    double t0 = -std::numeric_limits<double>::infinity(), t1 = std::numeric_limits<double>::infinity();
    bool miss = false;
    for (int a = 0; a < 3; ++a) {
      if (d[a] == 0.0) {
        if (o[a] < b.lo[a] || o[a] > b.hi[a]) miss = true;
        continue;
      }
      double ta = (b.lo[a] - o[a]) / d[a], tb = (b.hi[a] - o[a]) / d[a];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
    if (!miss && t0 <= t1 && t0 > 0) best = std::min(best, t0);
  }
  return best;
}

SceneConfig fixed_camera_config() {
  auto c = testing::quick_scene_config();
  c.camera_height = 1.8;
  c.camera_pitch_deg = 20.0;
  return c;
}

}  // namespace

TEST_SUITE("worldgen") {
  TEST_CASE("camera pose axes") {
    auto pose = CameraPose::looking_into_room({0.0, 2.0, 0.0}, 0.0);
    CHECK((pose.to_world({0, 0, 1}) - Vector3d(0, 2, 1)).norm() < 1e-12);  // forward = +z
    CHECK((pose.to_world({0, 1, 0}) - Vector3d(0, 1, 0)).norm() < 1e-12);  // down = -y
    CHECK((pose.to_world({1, 0, 0}) - Vector3d(-1, 2, 0)).norm() < 1e-12);
    auto pitched = CameraPose::looking_into_room({0.3, 1.7, 0.2}, 0.4);
    Vector3d p(0.5, -1.0, 3.0);
    CHECK((pitched.to_camera(pitched.to_world(p)) - p).norm() < 1e-12);
  }

  TEST_CASE("a camera facing the floor sees its height on the principal ray") {
    Room room;
    room.x0 = -5;
    room.x1 = 5;
    room.z0 = -5;
    room.z1 = 5;
    room.height = 3.0;
    const double h = 1.7;
    auto pose = CameraPose::looking_into_room({0.0, h, 0.0}, kPi / 2);
    auto scene = render_scene(room, pose, testing::quick_scene_config());
    const auto& c = scene.intrinsics;
    CHECK(scene.depth.values[static_cast<int>(c.cy)][static_cast<int>(c.cx)].item<double>() ==
          doctest::Approx(h).epsilon(1e-12));
  }

  TEST_CASE("rendered depth matches an independent intersector") {
    for (uint64_t seed : {1, 2, 3, 4}) {
      auto cfg = testing::quick_scene_config();
      cfg.obstacles_min = 2;
      auto scene = generate_scene(seed, cfg);
      const auto& c = scene.intrinsics;
      double worst = 0.0;
      for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
          const int v = i * (c.height - 1) / 15, u = j * (c.width - 1) / 15;
          const Vector3d dc((u - c.cx) / c.fx, (v - c.cy) / c.fy, 1.0);
          const double ref = oracle_depth(scene.room, scene.pose.position, scene.pose.world_from_camera * dc);
          worst = std::max(worst, std::abs(ref - scene.depth.values[v][u].item<double>()));
        }
      CHECK(worst <= 1e-6);
      CHECK(scene.depth.valid.all().item<bool>());
    }
  }

  TEST_CASE("generated scenes: determinism, obstacles inside, image range") {
    auto cfg = testing::quick_scene_config();
    auto a = generate_scene(11, cfg), b = generate_scene(11, cfg), c = generate_scene(12, cfg);
    CHECK(torch::equal(a.image, b.image));
    CHECK(torch::equal(a.depth.values, b.depth.values));
    CHECK_FALSE(torch::equal(a.depth.values, c.depth.values));
    CHECK(a.image.sizes() == torch::IntArrayRef({3, cfg.image_height, cfg.image_width}));
    CHECK(a.image.min().item<double>() >= 0.0);
    CHECK(a.image.max().item<double>() <= 1.0);
    for (uint64_t s = 0; s < 10; ++s) {
      auto sc = generate_scene(s, cfg);
      for (const auto& box : sc.room.obstacles) {
        CHECK(box.lo.x() >= sc.room.x0);
        CHECK(box.hi.x() <= sc.room.x1);
        CHECK(box.lo.z() >= sc.room.z0);
        CHECK(box.hi.z() <= sc.room.z1);
        CHECK(box.hi.y() <= sc.room.height);
      }
    }
  }

  TEST_CASE("dense collision cloud back-projects onto the rendered surfaces") {
    SceneConfig cfg;  // default supersampled cloud
    cfg.image_height = 32;
    cfg.image_width = 64;
    auto scene = generate_scene(5, cfg);
    CHECK(scene.cloud.size() == static_cast<size_t>(32 * 2 * 64 * 2));
    double worst = 0.0;
    for (size_t i = 0; i < scene.cloud.size(); i += 37) {
      const Vector3d& p = scene.cloud.points[i];
      const Vector3d dw = scene.pose.world_from_camera * (p / p.z());
      worst = std::max(worst, std::abs(oracle_depth(scene.room, scene.pose.position, dw) - p.z()));
    }
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("configuration errors") {
    SceneConfig c;
    c.room_width_min = -1.0;
    CHECK_THROWS_AS(generate_scene(0, c), ConfigError);
    c = SceneConfig{};
    c.obstacles_max = 5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    Room degenerate;
    degenerate.x1 = degenerate.x0;
    CHECK_THROWS_AS(render_scene(degenerate, CameraPose{}, SceneConfig{}), ConfigError);
    Room outside;
    outside.obstacles.push_back(Box{{0, 0, 1}, {10, 1, 2}});
    CHECK_THROWS_AS(render_scene(outside, CameraPose{}, SceneConfig{}), ConfigError);
  }

  TEST_CASE("gait pose stands on the floor") {
    for (double phase = 0.0; phase < 2 * kPi; phase += 0.3) {
      auto joints = gait_pose({1.0, 3.0}, 0.7, phase);
      REQUIRE(joints.size() == 19);
      for (const auto& j : joints) CHECK(j.y() >= 0.05);
      CHECK(joints[0].y() == doctest::Approx(0.97).epsilon(0.02));
      CHECK(std::abs(joints[0].x() - 1.0) < 1e-12);
      CHECK(std::abs(joints[0].z() - 3.0) < 1e-12);
    }
  }

  TEST_CASE("planning: straight when free, detours around boxes") {
    Room room;
    WalkConfig cfg;
    auto straight = plan_floor_path(room, {-1.0, 2.0}, {1.0, 4.5}, cfg);
    REQUIRE(straight.size() == 2);

    room.obstacles.push_back(Box{{-0.6, 0.0, 2.6}, {0.6, 1.0, 3.4}});
    auto path = plan_floor_path(room, {0.0, 1.5}, {0.0, 4.8}, cfg);
    REQUIRE(path.size() >= 3);
    const auto& box = room.obstacles[0];
    for (size_t i = 0; i + 1 < path.size(); ++i)
      for (int k = 0; k <= 50; ++k) {
        const Vector2d p = path[i] + (path[i + 1] - path[i]) * (k / 50.0);
        const bool inside = p.x() > box.lo.x() - 0.25 && p.x() < box.hi.x() + 0.25 &&
                            p.y() > box.lo.z() - 0.25 && p.y() < box.hi.z() + 0.25;
        CHECK_FALSE(inside);
      }
  }

  TEST_CASE("walks: shape, speed bound, clearance, straight in an empty room") {
    const auto graph = SkeletonGraph::default19();
    auto cfg = fixed_camera_config();
    cfg.obstacles_max = 0;
    auto empty = generate_scene(21, cfg);
    CHECK(empty.room.obstacles.empty());
    WalkConfig wc;
    for (uint64_t seed = 0; seed < 5; ++seed) {
      auto walk = generate_walk(empty, graph, seed, wc);
      CHECK(walk.sizes() == torch::IntArrayRef({3, 19, 16}));
      CHECK(walk.dtype() == torch::kFloat64);
      auto root = walk.select(1, 0);  // (3, T)
      auto step = (root.narrow(1, 1, 15) - root.narrow(1, 0, 15)).norm(2, 0);
      CHECK(step.max().item<double>() <= wc.alpha + 1e-12);
      CHECK(motion_collision_count(walk, graph, 0.06, empty.cloud) == 0);
      CHECK(walk.select(0, 2).min().item<double>() >= 0.1);
      // Straight line: every root position is collinear in the floor plane.
      std::vector<Vector2d> xz;
      for (int t = 0; t < 16; ++t) {
        Vector3d w = empty.pose.to_world({root[0][t].item<double>(), root[1][t].item<double>(),
                                          root[2][t].item<double>()});
        xz.emplace_back(w.x(), w.z());
      }
      const Vector2d dir = (xz.back() - xz.front()).normalized();
      for (const auto& p : xz) {
        const Vector2d off = p - xz.front();
        CHECK(std::abs(off.x() * dir.y() - off.y() * dir.x()) < 1e-9);
      }
    }
    auto a = generate_walk(empty, graph, 3, wc), b = generate_walk(empty, graph, 3, wc);
    CHECK(torch::equal(a, b));
    WalkConfig bad;
    bad.frames = 1;
    CHECK_THROWS_AS(generate_walk(empty, graph, 0, bad), ValidationError);
  }

  TEST_CASE("every sampled scene admits walks") {
    const auto graph = SkeletonGraph::default19();
    auto cfg = testing::quick_scene_config();
    cfg.obstacles_min = 3;
    for (uint64_t s = 0; s < 100; ++s) {
      auto scene = generate_scene(2000 + s, cfg);
      PointGrid grid(scene.cloud);
      CHECK_NOTHROW(generate_walk(scene, grid, graph, s, WalkConfig{}));
    }
  }

  TEST_CASE("ground-truth walks score a perfect non-collision grid") {
    const auto graph = SkeletonGraph::default19();
    auto cfg = testing::quick_scene_config();
    cfg.obstacles_min = 2;
    std::vector<SyntheticScene> scenes;
    std::vector<PointGrid> grids;
    for (uint64_t s = 0; s < 10; ++s) {
      scenes.push_back(generate_scene(500 + s, cfg));
      grids.emplace_back(scenes.back().cloud);
    }
    std::vector<torch::Tensor> walks;
    std::vector<const PointGrid*> per;
    for (int i = 0; i < 50; ++i) {
      walks.push_back(generate_walk(scenes[i % 10], grids[i % 10], graph, 77 + i, WalkConfig{}));
      per.push_back(&grids[i % 10]);
    }
    auto report = collision_report(walks, per, graph);
    for (const auto& row : report.ratios)
      for (double v : row) CHECK(v == 1.0);
  }
}
