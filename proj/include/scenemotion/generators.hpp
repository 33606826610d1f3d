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

#include <utility>

#include "scenemotion/core_motion.hpp"
#include "scenemotion/graph_layers.hpp"
#include "scenemotion/model_config.hpp"
#include "scenemotion/skeleton.hpp"

namespace scenemotion {

/// Samples root velocities from GP noise conditioned on the scene feature and
/// the initial pose; V = alpha * tanh(F).
///
///   in      noise | scene | initial pose tiled over t0 frames  (C_in, 1, t0)
///   stage 1 LeakyReLU, unpadded (1, 3) conv, BN                 (w0, 1, t0 - 2)
///   stage k LeakyReLU, (1, 3) conv, BN, x2 time                 (w_k, 1, 2 T)
///   out     LeakyReLU, (1, 3) conv, alpha * tanh                (3, 1, T)
class TrajectoryGeneratorImpl : public torch::nn::Module {
 public:
  TrajectoryGeneratorImpl(GeneratorConfig cfg, int64_t scene_channels, int64_t joints);

  /// z (B, noise, t0); f_scene (B, C); initial_pose (B, 3, J) camera frame.
  Trajectory forward(const torch::Tensor& z, const torch::Tensor& f_scene,
                     const torch::Tensor& initial_pose, ShapeTrace* trace = nullptr);

  const GeneratorConfig& config() const { return cfg_; }

 private:
  GeneratorConfig cfg_;
  int64_t scene_channels_;
  int64_t joints_;
  torch::nn::ModuleList convs_{nullptr};
  torch::nn::ModuleList norms_{nullptr};
  torch::nn::Conv2d out_{nullptr};
};
TORCH_MODULE(TrajectoryGenerator);

/// Graph-upsampling generator body shared by the pose and joint generators.
/// Walks the skeleton's coarsening ladder from one node to J while time goes
/// t0 -> t0 - 2 -> ... -> 2^K (t0 - 2). Returns raw (B, 3, J, T) activations.
class GraphGeneratorImpl : public torch::nn::Module {
 public:
  GraphGeneratorImpl(const SkeletonGraph& graph, int64_t in_channels,
                     const std::vector<int>& widths);
  torch::Tensor forward(const torch::Tensor& input, ShapeTrace* trace = nullptr);

 private:
  std::vector<int> stage_level_;
  torch::nn::ModuleList convs_{nullptr};
  torch::nn::ModuleList ups_{nullptr};
  torch::nn::ModuleList norms_{nullptr};
  std::vector<bool> has_up_;
  STGraphConv out_{nullptr};
};
TORCH_MODULE(GraphGenerator);

/// Samples root-relative pose sequences conditioned on the scene feature, the
/// whole flattened trajectory and the initial pose. Output is tanh-bounded and
/// centre-subtracted so the root joint is exactly zero.
class PoseGeneratorImpl : public torch::nn::Module {
 public:
  PoseGeneratorImpl(GeneratorConfig cfg, const SkeletonGraph& graph, int64_t scene_channels);

  /// z (B, pose_noise, t0); trajectory positions (B, T, 3); initial_pose (B, 3, J).
  PoseSequence forward(const torch::Tensor& z, const torch::Tensor& f_scene,
                       const torch::Tensor& trajectory, const torch::Tensor& initial_pose,
                       ShapeTrace* trace = nullptr);

 private:
  GeneratorConfig cfg_;
  SkeletonGraph graph_;
  int64_t scene_channels_;
  GraphGenerator body_{nullptr};
};
TORCH_MODULE(PoseGenerator);

/// Non-factorized baseline: one graph generator over J + 1 nodes emits the
/// pose and, on the extra node, the root velocity (alpha * tanh).
class JointGeneratorImpl : public torch::nn::Module {
 public:
  JointGeneratorImpl(GeneratorConfig cfg, const SkeletonGraph& graph, int64_t scene_channels);

  std::pair<Trajectory, PoseSequence> forward(const torch::Tensor& z, const torch::Tensor& f_scene,
                                              const torch::Tensor& initial_pose,
                                              ShapeTrace* trace = nullptr);

 private:
  GeneratorConfig cfg_;
  SkeletonGraph graph_;
  int64_t scene_channels_;
  GraphGenerator body_{nullptr};
};
TORCH_MODULE(JointGenerator);

}  // namespace scenemotion
