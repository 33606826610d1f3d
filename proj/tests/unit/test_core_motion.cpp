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

#include <numeric>
#include <set>

#include "doctest_torch.hpp"
#include "helpers.hpp"
#include "scenemotion/core_motion.hpp"
#include "scenemotion/error.hpp"
#include "scenemotion/gp_latent.hpp"
#include "scenemotion/skeleton.hpp"

using namespace scenemotion;
using testing::max_abs_diff;

namespace {

// Union-find reference for the tree check.
bool tree_oracle(int n, const std::vector<Bone>& bones) {
  if (static_cast<int>(bones.size()) != n - 1) return false;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : bones) {
    if (a < 0 || b < 0 || a >= n || b >= n) return false;
    const int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[ra] = rb;
  }
  return true;
}

SkeletonGraph flat_graph(int n, std::vector<Bone> bones) {
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  return SkeletonGraph(n, 0, std::move(bones), {1, n}, {std::vector<int>(n, 0), identity});
}

}  // namespace

TEST_SUITE("core_motion") {
  TEST_CASE("default skeleton has 19 joints and a 1-5-11-19 ladder") {
    auto g = SkeletonGraph::default19();
    CHECK(g.joint_count() == 19);
    CHECK(g.root_index() == 0);
    CHECK(g.levels() == std::vector<int>{1, 5, 11, 19});
    CHECK(g.bones().size() == 18);
    CHECK(is_spanning_tree(19, g.bones()));
    for (int k = 0; k < g.level_count(); ++k) {
      std::set<int> nodes(g.assignment(k).begin(), g.assignment(k).end());
      CHECK(static_cast<int>(nodes.size()) == g.levels()[k]);
    }
    CHECK(g.level_of(11) == 2);
    CHECK_THROWS_AS(g.level_of(7), ValidationError);
  }

  TEST_CASE("pseudo-node copy joins the root at coarser levels") {
    auto g = SkeletonGraph::default19();
    auto h = g.with_pseudo_node();
    CHECK(h.joint_count() == 20);
    CHECK(h.levels().back() == 20);
    for (int k = 0; k + 1 < h.level_count(); ++k) CHECK(h.assignment(k)[19] == h.assignment(k)[0]);
  }

  TEST_CASE("skeleton validation agrees with a union-find oracle on random bone lists") {
    std::mt19937 rng(11);
    int accepted = 0, rejected = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 6);
      const int m = std::max(0, n - 2 + static_cast<int>(rng() % 3));
      std::vector<Bone> bones;
      for (int e = 0; e < m; ++e) bones.emplace_back(rng() % n, rng() % n);
      const bool ok = tree_oracle(n, bones);
      CHECK(is_spanning_tree(n, bones) == ok);
      if (ok) {
        CHECK_NOTHROW(flat_graph(n, bones));
        ++accepted;
      } else {
        CHECK_THROWS_AS(flat_graph(n, bones), ValidationError);
        ++rejected;
      }
    }
    CHECK(accepted > 10);
    CHECK(rejected > 10);
  }

  TEST_CASE("integrate_velocities examples") {
    auto zero = integrate_velocities(torch::zeros({4, 3}, torch::kFloat64));
    CHECK(zero.positions.abs().max().item<double>() == 0.0);
    CHECK(zero.positions.size(0) == 4);

    auto v = torch::zeros({4, 3}, torch::kFloat64);
    v.select(1, 0).fill_(1.0);
    auto tr = integrate_velocities(v);
    for (int t = 0; t < 4; ++t) {
      CHECK(tr.positions[t][0].item<double>() == t);
      CHECK(tr.positions[t][1].item<double>() == 0.0);
    }

    auto gen = make_generator(3);
    auto rv = torch::randn({64, 3}, gen, torch::kFloat64);
    auto rp = integrate_velocities(rv).positions;
    auto acc = rv.accessor<double, 2>();
    double worst = 0.0;
    for (int t = 0; t < 64; ++t)
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int i = 0; i < t; ++i) s += acc[i][c];
        worst = std::max(worst, std::abs(s - rp[t][c].item<double>()));
      }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("integrate_velocities rejects non-finite or empty input") {
    auto v = torch::zeros({4, 3}, torch::kFloat64);
    v[2][1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(integrate_velocities(v), ValidationError);
    v[2][1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(integrate_velocities(v), ValidationError);
    CHECK_THROWS_AS(integrate_velocities(torch::zeros({0, 3})), ValidationError);
    CHECK_THROWS_AS(integrate_velocities(torch::zeros({4, 2})), ValidationError);
  }

  TEST_CASE("prefix-sum law: differentiate inverts integrate") {
    auto gen = make_generator(5);
    // Dyadic values keep every partial sum exact, so equality is bitwise.
    auto dyadic = torch::randint(-64, 64, {2, 32, 3}, gen, torch::kFloat64) / 64.0;
    auto back = differentiate_trajectory(integrate_velocities(dyadic).positions);
    CHECK(torch::equal(back, dyadic.narrow(-2, 0, 31)));

    auto v = torch::randn({32, 3}, gen, torch::kFloat64);
    CHECK(max_abs_diff(differentiate_trajectory(integrate_velocities(v).positions), v.narrow(0, 0, 31)) < 1e-12);
  }

  TEST_CASE("differentiate_trajectory examples and errors") {
    CHECK(differentiate_trajectory(torch::zeros({5, 3})).abs().max().item<double>() == 0.0);
    auto gen = make_generator(6);
    auto r = torch::randn({20, 3}, gen, torch::kFloat64);
    r[0].zero_();
    auto v = differentiate_trajectory(r);
    auto again = integrate_velocities(torch::cat({v, torch::zeros({1, 3}, torch::kFloat64)})).positions;
    CHECK(max_abs_diff(again, r) < 1e-9);

    auto off = r.clone();
    off[0][0] = 0.5;
    CHECK_THROWS_AS(differentiate_trajectory(off), ValidationError);
    CHECK_THROWS_AS(differentiate_trajectory(torch::zeros({1, 3})), ValidationError);
  }

  TEST_CASE("compose_motion examples") {
    auto gen = make_generator(7);
    auto r = integrate_velocities(torch::randn({8, 3}, gen, torch::kFloat64));

    auto zero_pose = PoseSequence{torch::zeros({3, 19, 8}, torch::kFloat64)};
    auto m = compose_motion(zero_pose, r);
    for (int j = 0; j < 19; ++j) CHECK(torch::equal(m.joints.select(1, j), r.positions.transpose(0, 1)));

    auto p = torch::randn({3, 19, 8}, gen, torch::kFloat64);
    auto still = integrate_velocities(torch::zeros({8, 3}, torch::kFloat64));
    CHECK(torch::equal(compose_motion(PoseSequence{p}, still).joints, p));

    auto x = compose_motion(PoseSequence{p}, r).joints;
    auto rebuilt = x - r.positions.transpose(0, 1).unsqueeze(1);
    CHECK(max_abs_diff(rebuilt, p) < 1e-12);

    CHECK_THROWS_AS(compose_motion(PoseSequence{torch::zeros({3, 19, 7})}, r), ValidationError);
  }

  TEST_CASE("center_subtract examples and round trip") {
    auto g = SkeletonGraph::default19();
    auto gen = make_generator(8);

    auto centred = torch::randn({3, 19, 5}, gen, torch::kFloat64);
    centred -= centred.select(1, 0).unsqueeze(1);
    auto [p0, track0] = center_subtract(centred, g);
    CHECK(track0.abs().max().item<double>() == 0.0);
    CHECK(torch::equal(p0.poses, centred));

    auto single = torch::randn({3, 19, 1}, gen, torch::kFloat64);
    single.select(1, 0).select(1, 0).copy_(torch::tensor({1.0, 2.0, 3.0}, torch::kFloat64));
    auto [p1, track1] = center_subtract(single, g);
    CHECK(max_abs_diff(track1, torch::tensor({{1.0, 2.0, 3.0}}, torch::kFloat64)) == 0.0);
    CHECK(p1.poses.select(1, 0).abs().max().item<double>() == 0.0);

    auto raw = torch::randn({2, 3, 19, 16}, gen, torch::kFloat64);
    auto [p, track] = center_subtract(raw, g);
    CHECK(p.poses.select(-2, 0).abs().max().item<double>() == 0.0);
    auto joined = p.poses + track.transpose(-1, -2).unsqueeze(-2);
    CHECK(max_abs_diff(joined, raw) < 1e-12);
    CHECK(torch::equal(root_track(raw, 0), track));

    CHECK_THROWS_AS(center_subtract(torch::zeros({3, 18, 4}), g), ValidationError);
  }

  TEST_CASE("composition identity on zero-root poses") {
    auto g = SkeletonGraph::default19();
    auto gen = make_generator(9);
    for (int trial = 0; trial < 5; ++trial) {
      auto p = torch::randn({3, 19, 12}, gen, torch::kFloat64);
      p -= p.select(1, 0).unsqueeze(1);
      auto r = integrate_velocities(torch::randn({12, 3}, gen, torch::kFloat64));
      auto x = compose_motion(PoseSequence{p}, r);
      CHECK(torch::equal(root_track(x.joints, 0), r.positions));
      auto [p2, r2] = center_subtract(x.joints, g);
      CHECK(max_abs_diff(p2.poses, p) < 1e-12);
      CHECK(max_abs_diff(r2, r.positions) < 1e-12);
    }
  }

  TEST_CASE("translate shifts every joint by the offset") {
    auto gen = make_generator(10);
    auto x = torch::randn({2, 3, 19, 4}, gen, torch::kFloat64);
    auto off = torch::randn({2, 3}, gen, torch::kFloat64);
    auto y = translate(x, off);
    CHECK(max_abs_diff(y - x, off.view({2, 3, 1, 1}).expand_as(x)) < 1e-12);
  }
}
