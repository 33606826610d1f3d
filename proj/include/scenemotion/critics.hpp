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
#include "scenemotion/skeleton.hpp"

namespace scenemotion {

// Every critic returns one real score per batch element, shape (B).
// Critics contain no normalization layers: the gradient penalty needs
// per-sample input gradients.

/// Temporal conv critic over root positions with scene / initial-pose
/// conditions tiled along time. Five stages (the last four halve time), an
/// output conv, global average pooling and a linear head.
class TrajectoryCriticImpl : public torch::nn::Module {
 public:
  TrajectoryCriticImpl(const CriticConfig& cfg, int64_t scene_channels, int64_t joints);

  /// positions (B, T, 3); f_scene (B, C); initial_pose (B, 3, J).
  torch::Tensor forward(const torch::Tensor& positions, const torch::Tensor& f_scene,
                        const torch::Tensor& initial_pose, ShapeTrace* trace = nullptr);

  /// The final linear map; exposed so tests can freeze the critic at zero.
  torch::nn::Linear& head() { return head_; }

 private:
  int64_t scene_channels_;
  int64_t joints_;
  torch::nn::ModuleList convs_{nullptr};
  torch::nn::Conv2d out_{nullptr};
  torch::nn::Linear head_{nullptr};
};
TORCH_MODULE(TrajectoryCritic);

/// Graph-downsampling critic over (B, C, J, T) sequences: joints contract
/// along the coarsening ladder (19 -> 11 -> 11 -> 5 -> 5 -> 1 by default) while
/// time halves in the last four stages. Shared by the pose and projection
/// critics, which differ only in their input channels.
class GraphCriticImpl : public torch::nn::Module {
 public:
  GraphCriticImpl(const CriticConfig& cfg, const SkeletonGraph& graph, int64_t in_channels);
  torch::Tensor forward(const torch::Tensor& x, ShapeTrace* trace = nullptr);
  torch::nn::Linear& head() { return head_; }

 private:
  std::vector<bool> has_down_;
  torch::nn::ModuleList convs_{nullptr};
  torch::nn::ModuleList downs_{nullptr};
  torch::nn::Conv2d out_{nullptr};
  torch::nn::Linear head_{nullptr};
};
TORCH_MODULE(GraphCritic);

/// Pose critic: initial pose prepended as the first frame, trajectory tiled
/// over the joints, scene feature tiled over joints and time.
class PoseCriticImpl : public torch::nn::Module {
 public:
  PoseCriticImpl(const CriticConfig& cfg, const SkeletonGraph& graph, int64_t scene_channels);

  /// poses (B, 3, J, T+1) root-relative; trajectory (B, T+1, 3); f_scene (B, C).
  torch::Tensor forward(const torch::Tensor& poses, const torch::Tensor& trajectory,
                        const torch::Tensor& f_scene, ShapeTrace* trace = nullptr);
  torch::nn::Linear& head() { return body_->head(); }

 private:
  int64_t scene_channels_;
  int64_t joints_;
  GraphCritic body_{nullptr};
};
TORCH_MODULE(PoseCritic);

/// Projection critic on the 2D motion (normalized pixel coordinates).
class ProjectionCriticImpl : public torch::nn::Module {
 public:
  ProjectionCriticImpl(const CriticConfig& cfg, const SkeletonGraph& graph, int64_t scene_channels);

  /// motion2d (B, 2, J, T+1) in [-1, 1]; f_scene (B, C).
  torch::Tensor forward(const torch::Tensor& motion2d, const torch::Tensor& f_scene,
                        ShapeTrace* trace = nullptr);
  torch::nn::Linear& head() { return body_->head(); }

 private:
  int64_t scene_channels_;
  int64_t joints_;
  GraphCritic body_{nullptr};
};
TORCH_MODULE(ProjectionCritic);

/// 2D conv critic over stacked relative depth crops (crops as channels).
class ContextCriticImpl : public torch::nn::Module {
 public:
  ContextCriticImpl(const CriticConfig& cfg, int64_t n_crops);

  /// crops (B, n_crops, Hc, Wc).
  torch::Tensor forward(const torch::Tensor& crops, ShapeTrace* trace = nullptr);
  torch::nn::Linear& head() { return head_; }
  int64_t crop_count() const { return n_crops_; }

 private:
  int64_t n_crops_;
  torch::nn::ModuleList convs_{nullptr};
  torch::nn::Conv2d out_{nullptr};
  torch::nn::Linear head_{nullptr};
};
TORCH_MODULE(ContextCritic);

}  // namespace scenemotion
