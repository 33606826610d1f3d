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

#include <vector>

#include "scenemotion/critics.hpp"
#include "scenemotion/generators.hpp"
#include "scenemotion/gp_latent.hpp"
#include "scenemotion/scene_encoder.hpp"
#include "scenemotion/scene_geometry.hpp"

namespace scenemotion {

/// Which parts of the model take part in training. Trajectory and pose
/// critics are always present.
struct AblationFlags {
  bool factorized = true;  // M: separate trajectory and pose generators
  bool depth = true;       // D: depth supervision of the encoder
  bool projection = true;  // P: projection critic
  bool context = true;     // C: context critic
  bool trajectory = true;
  bool pose = true;

  /// Flags named in `disabled` (comma separated letters, e.g. "P,C") off.
  static AblationFlags without(const std::string& disabled);
  std::string label() const;
};

struct GeneratedMotion {
  SceneFeature scene;
  Trajectory trajectory;
  PoseSequence pose;
  torch::Tensor joints;  // (B, 3, J, T) camera frame, anchored at the initial root
};

/// Scene encoder plus either the factorized trajectory/pose generators or
/// the joint baseline, with their GP latent samplers.
class GeneratorStackImpl : public torch::nn::Module {
 public:
  GeneratorStackImpl(ModelConfig cfg, SkeletonGraph graph, bool factorized = true);

  /// image (B, 3, H, W); initial_pose (B, 3, J) camera frame.
  GeneratedMotion forward(const torch::Tensor& image, const torch::Tensor& initial_pose,
                          at::Generator& gen);
  /// Same with explicit latents; `z_trajectory` is ignored by the joint baseline.
  GeneratedMotion forward_latent(const torch::Tensor& image, const torch::Tensor& initial_pose,
                                 const torch::Tensor& z_trajectory, const torch::Tensor& z_pose);
  GeneratedMotion forward_latent(const SceneFeature& scene, const torch::Tensor& initial_pose,
                                 const torch::Tensor& z_trajectory, const torch::Tensor& z_pose);

  torch::Tensor sample_trajectory_latent(int64_t batch, at::Generator& gen) const;
  torch::Tensor sample_pose_latent(int64_t batch, at::Generator& gen) const;

  const ModelConfig& config() const { return cfg_; }
  const SkeletonGraph& graph() const { return graph_; }
  bool factorized() const { return factorized_; }

  SceneEncoder encoder{nullptr};
  TrajectoryGenerator trajectory{nullptr};
  PoseGenerator pose{nullptr};
  JointGenerator joint{nullptr};

 private:
  ModelConfig cfg_;
  SkeletonGraph graph_;
  bool factorized_;
  GPLatentSampler trajectory_latent_;
  GPLatentSampler pose_latent_;
};
TORCH_MODULE(GeneratorStack);

class CriticSetImpl : public torch::nn::Module {
 public:
  CriticSetImpl(const ModelConfig& cfg, const SkeletonGraph& graph, const AblationFlags& flags);

  TrajectoryCritic trajectory{nullptr};
  PoseCritic pose{nullptr};
  ProjectionCritic projection{nullptr};
  ContextCritic context{nullptr};
};
TORCH_MODULE(CriticSet);

/// Inputs of every critic for one batch of absolute motions. The initial
/// pose is prepended as frame 0, so sequences have T + 1 frames.
struct CriticInputs {
  torch::Tensor positions;   // (B, T, 3) root track relative to the initial root
  torch::Tensor poses;       // (B, 3, J, T+1) root-relative
  torch::Tensor track;       // (B, T+1, 3) relative root track with the origin prepended
  torch::Tensor motion2d;    // (B, 2, J, T+1) normalized pixels; empty if not requested
  torch::Tensor crops;       // (B, n, Hc, Wc); empty if not requested
};

struct CriticInputOptions {
  bool projection = true;
  bool context = true;
  int64_t crop_height = 32;
  int64_t crop_width = 64;
  int64_t crop_interval = 8;
};

/// joints (B, 3, J, T) absolute; initial_pose (B, 3, J) absolute; depth
/// (B, H, W) metric depth used for the crops; one camera per batch element.
CriticInputs build_critic_inputs(const torch::Tensor& joints, const torch::Tensor& initial_pose,
                                 const torch::Tensor& depth,
                                 const std::vector<CameraIntrinsics>& cams, int root_index,
                                 const CriticInputOptions& opts);

}  // namespace scenemotion
