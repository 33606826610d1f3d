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

#include <optional>
#include <vector>

#include "json.hpp"
#include "scenemotion/collision.hpp"
#include "scenemotion/skeleton.hpp"

namespace scenemotion {

// ---- Motion FID ------------------------------------------------------------

struct ERDConfig {
  int hidden = 32;
  int encoder_width = 64;
  int steps = 400;
  int batch = 32;
  double learning_rate = 1e-3;
  uint64_t seed = 0;
};

/// Encoder-recurrent-decoder next-frame predictor over flattened poses.
class ERDModelImpl : public torch::nn::Module {
 public:
  ERDModelImpl(int64_t pose_dim, int64_t clip_length, const ERDConfig& cfg);

  /// clips (N, L, D) -> predicted frames 1..L-1, (N, L-1, D).
  torch::Tensor predict_next(const torch::Tensor& clips);
  /// Final recurrent hidden state after consuming each clip, (N, hidden).
  torch::Tensor features(const torch::Tensor& clips);
  int64_t clip_length() const { return clip_length_; }
  int64_t feature_dim() const { return hidden_; }

 private:
  torch::Tensor run(const torch::Tensor& clips, torch::Tensor* last_hidden);
  int64_t pose_dim_, clip_length_, hidden_;
  torch::nn::Linear encoder_{nullptr};
  torch::nn::LSTM cell_{nullptr};
  torch::nn::Linear decoder_{nullptr};
};
TORCH_MODULE(ERDModel);

/// Non-overlapping windows of length `length` from each (3, J, T) motion,
/// flattened per frame to 3J values with the window's first root subtracted.
/// Returns (N, length, 3J).
torch::Tensor extract_clips(const std::vector<torch::Tensor>& motions, int length, int root_index = 0);

ERDModel train_erd(const std::vector<torch::Tensor>& motions, int clip_length, const ERDConfig& cfg = {});
torch::Tensor erd_features(ERDModel& model, const torch::Tensor& clips);

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
Gaussian fit_gaussian(const torch::Tensor& features);

double frechet_distance(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& sigma1,
                        const Eigen::VectorXd& mu2, const Eigen::MatrixXd& sigma2);

struct FIDCell {
  int model_length = 0;
  int clip_length = 0;
  double value = 0.0;
};

struct FIDReport {
  std::vector<FIDCell> cells;
  std::optional<double> short_term;  // clip lengths 2, 4
  std::optional<double> mid_term;    // 8, 16
  std::optional<double> long_term;   // 32, 64
  double average = 0.0;
};

/// ERD models for every training length, all trained on the real set.
struct ERDSuite {
  std::vector<ERDModel> models;
  std::vector<int> clip_lengths;
};

/// Model lengths 16, 32, 64 and clip lengths 2..64 scaled to `frames`
/// (e.g. 4, 8, 16 and 2, 4, 8, 16 for 16-frame motions).
ERDSuite train_erd_suite(const std::vector<torch::Tensor>& real, int frames, const ERDConfig& cfg = {});

FIDReport motion_fid(const std::vector<torch::Tensor>& real, const std::vector<torch::Tensor>& generated,
                     ERDSuite& suite);

/// Gaussian white noise with the per-coordinate mean and spread of `reference`.
std::vector<torch::Tensor> white_noise_motions(const std::vector<torch::Tensor>& reference, int count,
                                               uint64_t seed);

// ---- Non-collision ratio ---------------------------------------------------

double non_collision_ratio(const std::vector<torch::Tensor>& motions, const SkeletonGraph& graph,
                           const PointGrid& grid, double r, int64_t t);

struct CollisionReport {
  std::vector<double> radii_mm = {30.0, 45.0, 60.0};
  std::vector<int64_t> thresholds = {40, 60, 80, 100};
  std::vector<std::vector<double>> ratios;  // [radius][threshold]
  std::vector<double> per_radius;
  double average = 0.0;
};

/// Motion i is checked against grids[i]. Throws std::logic_error if the
/// monotonicity in radius or threshold is violated.
CollisionReport collision_report(const std::vector<torch::Tensor>& motions,
                                 const std::vector<const PointGrid*>& grids, const SkeletonGraph& graph);

// ---- Trajectory diversity --------------------------------------------------

/// trajectories (N, T, 3). With `endpoint_tolerance`, keeps samples whose final
/// position lies within that distance of the medoid endpoint. Returns, per
/// frame, the population standard deviation across samples averaged over x and z.
std::vector<double> trajectory_std_curve(const torch::Tensor& trajectories,
                                         std::optional<double> endpoint_tolerance = std::nullopt);

// ---- Reports ---------------------------------------------------------------

nlohmann::json to_json(const FIDReport& r);
nlohmann::json to_json(const CollisionReport& r);

}  // namespace scenemotion
