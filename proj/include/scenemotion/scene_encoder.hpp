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

#include <torch/torch.h>

#include "scenemotion/graph_layers.hpp"
#include "scenemotion/model_config.hpp"

namespace scenemotion {

struct SceneFeature {
  torch::Tensor f_scene;      // (B, C) pooled scene feature
  torch::Tensor feature_map;  // (B, C', H/16, W/16) input to the depth head
  torch::Tensor skip;         // (B, C'', H/4, W/4) higher-resolution features for the depth head
};

class ResidualBlockImpl : public torch::nn::Module {
 public:
  ResidualBlockImpl(int64_t in_channels, int64_t out_channels, int64_t stride);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d conv1_{nullptr}, conv2_{nullptr}, shortcut_{nullptr};
  torch::nn::BatchNorm2d bn1_{nullptr}, bn2_{nullptr}, bn_shortcut_{nullptr};
};
TORCH_MODULE(ResidualBlock);

/// Small residual image encoder with an auxiliary depth decoder.
/// Image (B, 3, H, W) in [0, 1] -> f_scene (B, C); depth head -> (B, H, W) > 0.
class SceneEncoderImpl : public torch::nn::Module {
 public:
  explicit SceneEncoderImpl(EncoderConfig cfg);

  SceneFeature encode(const torch::Tensor& image, ShapeTrace* trace = nullptr);
  torch::Tensor predict_depth(const SceneFeature& feature);

  const EncoderConfig& config() const { return cfg_; }
  /// Parameters of the depth decoder only (not shared with f_scene).
  std::vector<torch::Tensor> depth_head_parameters() const;

 private:
  EncoderConfig cfg_;
  torch::nn::Conv2d stem_{nullptr};
  torch::nn::BatchNorm2d stem_bn_{nullptr};
  ResidualBlock stage1_{nullptr}, stage2_{nullptr}, stage3_{nullptr};
  torch::nn::Conv2d feature_proj_{nullptr};
  torch::nn::Conv2d depth_reduce_{nullptr}, depth_fuse_{nullptr}, depth_out_{nullptr};
};
TORCH_MODULE(SceneEncoder);

/// Reverse Huber loss averaged over valid pixels. With residual r and
/// c = 0.2 * max |r| (treated as a constant), each element contributes |r|
/// when |r| <= c and (r^2 + c^2) / (2c) otherwise.
torch::Tensor berhu_loss(const torch::Tensor& pred, const torch::Tensor& target,
                         const torch::Tensor& valid);
torch::Tensor berhu_loss(const torch::Tensor& pred, const torch::Tensor& target);

}  // namespace scenemotion
