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
#include "scenemotion/error.hpp"
#include "scenemotion/evaluation.hpp"
#include "scenemotion/gp_latent.hpp"

using namespace scenemotion;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ERDConfig quick_erd(uint64_t seed = 0) {
  ERDConfig c;
  c.steps = 150;
  c.seed = seed;
  return c;
}

std::vector<torch::Tensor> subset(const std::vector<torch::Tensor>& v, size_t begin, size_t end) {
  return {v.begin() + begin, v.begin() + end};
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("frechet distance closed forms") {
    MatrixXd eye = MatrixXd::Identity(2, 2);
    VectorXd zero = VectorXd::Zero(2);
    VectorXd shift(2);
    shift << 3, 4;
    CHECK(std::abs(frechet_distance(zero, eye, zero, eye)) < 1e-6);
    CHECK(frechet_distance(zero, eye, shift, eye) == doctest::Approx(25.0).epsilon(1e-9));
    MatrixXd a = VectorXd((VectorXd(2) << 1, 4).finished()).asDiagonal();
    MatrixXd b = VectorXd((VectorXd(2) << 9, 1).finished()).asDiagonal();
    CHECK(frechet_distance(zero, a, zero, b) == doctest::Approx(5.0).epsilon(1e-9));
  }

  TEST_CASE("frechet distance is symmetric and non-negative on random Gaussians") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = 2 + trial % 6;
      MatrixXd x(d, d), y(d, d);
      VectorXd m1(d), m2(d);
      for (int i = 0; i < d; ++i) {
        m1(i) = n(rng);
        m2(i) = n(rng);
        for (int j = 0; j < d; ++j) {
          x(i, j) = n(rng);
          y(i, j) = n(rng);
        }
      }
      MatrixXd s1 = x * x.transpose(), s2 = y * y.transpose();
      if (trial % 4 == 0) s2 = s1;  // rank-deficient and identical cases
      const double ab = frechet_distance(m1, s1, m2, s2);
      const double ba = frechet_distance(m2, s2, m1, s1);
      CHECK(ab >= 0.0);
      CHECK(std::abs(ab - ba) <= 1e-8 * std::max(1.0, ab));
    }
  }

  TEST_CASE("frechet distance rejects indefinite or mismatched input") {
    MatrixXd bad(2, 2);
    bad << 1, 0, 0, -1;
    VectorXd z = VectorXd::Zero(2);
    CHECK_THROWS_AS(frechet_distance(z, bad, z, MatrixXd::Identity(2, 2)), NumericalError);
    CHECK_THROWS_AS(frechet_distance(z, MatrixXd::Identity(2, 2), VectorXd::Zero(3), MatrixXd::Identity(3, 3)),
                    ValidationError);
  }

  TEST_CASE("fit_gaussian") {
    auto f = torch::tensor({1.0, 2.0, 3.0, 6.0}, torch::kFloat64).view({2, 2});
    auto g = fit_gaussian(f);
    CHECK(g.mean(0) == 2.0);
    CHECK(g.mean(1) == 4.0);
    CHECK(g.cov(0, 0) == doctest::Approx(2.0));
    CHECK(g.cov(0, 1) == doctest::Approx(4.0));
    CHECK_THROWS_AS(fit_gaussian(f.narrow(0, 0, 1)), ValidationError);
  }

  TEST_CASE("extract_clips windows and root offsets") {
    const auto& walks = testing::walk_set().motions;
    auto clips = extract_clips(subset(walks, 0, 3), 4);
    CHECK(clips.sizes() == torch::IntArrayRef({12, 4, 57}));
    // Window 1 of motion 0 covers frames 4..7, shifted by the root at frame 4.
    auto m = walks[0];
    auto expected = (m.narrow(2, 4, 4) - m.select(1, 0).select(1, 4).view({3, 1, 1})).permute({2, 0, 1});
    CHECK(testing::max_abs_diff(clips[1].view({4, 3, 19}), expected) < 1e-6);
    CHECK(extract_clips(subset(walks, 0, 2), 5).size(0) == 6);
  }

  TEST_CASE("ERD training: deterministic, beats the repeat-last baseline") {
    const auto& walks = testing::walk_set().motions;
    auto train = subset(walks, 0, 45), held = subset(walks, 45, 60);
    auto a = train_erd(train, 8, quick_erd(1));
    auto b = train_erd(train, 8, quick_erd(1));
    auto pa = a->parameters(), pb = b->parameters();
    REQUIRE(pa.size() == pb.size());
    for (size_t i = 0; i < pa.size(); ++i) CHECK(torch::equal(pa[i], pb[i]));

    auto clips = extract_clips(held, 8).to(torch::kFloat32);
    torch::NoGradGuard ng;
    auto pred = a->predict_next(clips);
    auto target = clips.narrow(1, 1, 7);
    const double model_err = (pred - target).pow(2).mean().item<double>();
    const double repeat_err = (clips.narrow(1, 0, 7) - target).pow(2).mean().item<double>();
    CHECK(model_err < repeat_err);

    CHECK(erd_features(a, extract_clips(held, 2)).size(1) == erd_features(a, clips).size(1));
    CHECK(torch::equal(erd_features(a, clips), erd_features(a, clips.clone())));
    CHECK_THROWS_AS(erd_features(a, extract_clips(held, 16)), ValidationError);
    CHECK_THROWS_AS(train_erd(subset(walks, 0, 1), 16, quick_erd()), ValidationError);
  }

  TEST_CASE("ERD features separate real from frozen clips") {
    const auto& walks = testing::walk_set().motions;
    auto model = train_erd(subset(walks, 0, 45), 8, quick_erd(2));
    auto clips = extract_clips(walks, 8).to(torch::kFloat32);
    auto frozen = clips.narrow(1, 0, 1).expand_as(clips).contiguous();
    torch::NoGradGuard ng;
    auto fr = erd_features(model, clips).to(torch::kFloat64);
    auto fs = erd_features(model, frozen).to(torch::kFloat64);
    const int64_t half = fr.size(0) / 2;
    auto even = fr.slice(0, 0, 2 * half, 2).mean(0), odd = fr.slice(0, 1, 2 * half, 2).mean(0);
    const double same = (even - odd).norm().item<double>();
    const double apart = (even - fs.mean(0)).norm().item<double>();
    CHECK(apart > 3.0 * same);
  }

  TEST_CASE("motion FID: identical sets, split halves vs noise, aggregates, permutation") {
    const auto& walks = testing::walk_set().motions;
    auto real = subset(walks, 0, 30), other = subset(walks, 30, 60);
    auto suite = train_erd_suite(real, 16, quick_erd(3));
    CHECK(suite.clip_lengths == std::vector<int>{2, 4, 8, 16});
    REQUIRE(suite.models.size() == 3);

    auto same = motion_fid(real, real, suite);
    for (const auto& c : same.cells) CHECK(c.value < 1e-3);

    auto split = motion_fid(real, other, suite);
    auto noise = motion_fid(real, white_noise_motions(real, 30, 9), suite);
    CHECK(split.average * 5.0 <= noise.average);

    // Pairing rule: model length L scores every clip length <= L.
    std::set<std::pair<int, int>> pairs;
    for (const auto& c : split.cells) {
      CHECK(c.clip_length <= c.model_length);
      pairs.insert({c.model_length, c.clip_length});
    }
    CHECK(pairs.size() == split.cells.size());
    CHECK(split.cells.size() == 2 + 3 + 4);
    auto mean_over = [&](std::set<int> lengths) {
      double s = 0.0;
      int n = 0;
      for (const auto& c : split.cells)
        if (lengths.count(c.clip_length)) s += c.value, ++n;
      return s / n;
    };
    REQUIRE(split.short_term.has_value());
    REQUIRE(split.mid_term.has_value());
    CHECK(*split.short_term == doctest::Approx(mean_over({2, 4})));
    CHECK(*split.mid_term == doctest::Approx(mean_over({8, 16})));
    CHECK_FALSE(split.long_term.has_value());
    CHECK(split.average == doctest::Approx(mean_over({2, 4, 8, 16})));

    auto shuffled = other;
    std::reverse(shuffled.begin(), shuffled.end());
    auto again = motion_fid(real, shuffled, suite);
    for (size_t i = 0; i < split.cells.size(); ++i)
      CHECK(again.cells[i].value == doctest::Approx(split.cells[i].value).epsilon(1e-6));

    CHECK_THROWS_AS(motion_fid(real, subset(walks, 0, 1), suite), ValidationError);
    auto j = to_json(split);
    CHECK(j["long"].is_null());
    CHECK(j["cells"].size() == split.cells.size());
  }

  TEST_CASE("non-collision ratio: far motions, embedded motion, errors") {
    const auto graph = SkeletonGraph::default19();
    const auto& ws = testing::walk_set();
    const auto& data = testing::tiny_dataset();
    PointGrid grid(data.scenes[0].cloud);

    std::vector<torch::Tensor> far;
    for (int i = 0; i < 4; ++i) far.push_back(ws.motions[i] + 100.0);
    for (double r : {0.03, 0.045, 0.06})
      for (int64_t t : {40, 60, 80, 100}) CHECK(non_collision_ratio(far, graph, grid, r, t) == 1.0);

    // A dense block of points engulfing a motion's pelvis and legs.
    auto m = ws.motions[0];
    Eigen::Vector3d root(m[0][0][0].item<double>(), m[1][0][0].item<double>(), m[2][0][0].item<double>());
    PointCloud block;
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j)
        for (int k = -10; k <= 10; ++k) block.points.push_back(root + 0.02 * Eigen::Vector3d(i, j, k));
    PointGrid dense(block);
    const auto count = motion_collision_count(m, graph, 0.03, block);
    CHECK(count > 100);
    CHECK(non_collision_ratio({m}, graph, dense, 0.03, 40) == 0.0);
    CHECK(non_collision_ratio({m, far[1]}, graph, dense, 0.03, 40) == 0.5);

    CHECK_THROWS_AS(non_collision_ratio({}, graph, grid, 0.03, 40), ValidationError);
    CHECK_THROWS_AS(non_collision_ratio(far, graph, grid, 0.0, 40), ValidationError);
  }

  TEST_CASE("collision report grid and ground-truth calibration") {
    const auto graph = SkeletonGraph::default19();
    const auto& ws = testing::walk_set();
    const auto& data = testing::tiny_dataset();
    std::vector<PointGrid> grids;
    for (const auto& s : data.scenes) grids.emplace_back(s.cloud);
    std::vector<const PointGrid*> per_motion;
    for (int s : ws.scenes) per_motion.push_back(&grids[s]);
    auto report = collision_report(ws.motions, per_motion, graph);
    CHECK(report.radii_mm == std::vector<double>{30, 45, 60});
    CHECK(report.thresholds == std::vector<int64_t>{40, 60, 80, 100});
    REQUIRE(report.ratios.size() == 3);
    for (const auto& row : report.ratios) {
      REQUIRE(row.size() == 4);
      for (double v : row) CHECK(v == 1.0);
    }
    CHECK(report.average == 1.0);
    CHECK(to_json(report)["ratios"].size() == 3);
    CHECK_THROWS_AS(collision_report(ws.motions, {}, graph), ValidationError);
  }

  TEST_CASE("trajectory std curve") {
    auto line = torch::zeros({1, 9, 3}, torch::kFloat64);
    line.select(2, 2).copy_(torch::linspace(0, 2, 9, torch::kFloat64));
    auto same = line.expand({5, 9, 3}).contiguous();
    for (double v : trajectory_std_curve(same)) CHECK(v == 0.0);

    // Two paths to the same endpoint bowed by +-d in x, peaking mid-way.
    const double d = 0.3;
    auto bow = torch::sin(torch::linspace(0, M_PI, 9, torch::kFloat64)) * d;
    auto a = line.clone(), b = line.clone();
    a[0].select(1, 0).copy_(bow);
    b[0].select(1, 0).copy_(-bow);
    auto curve = trajectory_std_curve(torch::cat({a, b}));
    REQUIRE(curve.size() == 9);
    // std in x is d at mid-frame, zero in z; the curve averages x and z.
    CHECK(curve[4] == doctest::Approx(d / 2.0).epsilon(1e-12));
    CHECK(std::max_element(curve.begin(), curve.end()) - curve.begin() == 4);
    CHECK(curve.front() == doctest::Approx(0.0));

    auto outlier = line.clone();
    outlier[0][8][0] = 5.0;
    auto mixed = torch::cat({same.narrow(0, 0, 3), outlier});
    auto filtered = trajectory_std_curve(mixed, 0.2);
    for (double v : filtered) CHECK(v == 0.0);
    CHECK_THROWS_AS(trajectory_std_curve(torch::cat({line, outlier + 10.0}), 0.2), ValidationError);
    CHECK_THROWS_AS(trajectory_std_curve(line), ValidationError);
  }
}
