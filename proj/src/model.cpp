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

#include "scenemotion/model.hpp"

#include <sstream>

#include "scenemotion/depth_crop.hpp"
#include "scenemotion/error.hpp"

namespace scenemotion {

AblationFlags AblationFlags::without(const std::string& disabled) {
  AblationFlags f;
  std::stringstream ss(disabled);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    if (item == "M" || item == "m") {
      f.factorized = false;
    } else if (item == "D" || item == "d") {
      f.depth = false;
    } else if (item == "P" || item == "p") {
      f.projection = false;
    } else if (item == "C" || item == "c") {
      f.context = false;
    } else {
      throw ConfigError("unknown ablation flag '" + item + "' (expected M, D, P or C)");
    }
  }
  return f;
}

std::string AblationFlags::label() const {
  std::string s;
  for (auto [on, name] : {std::pair{factorized, "M"}, {depth, "D"}, {projection, "P"}, {context, "C"}}) {
    if (!on) continue;
    if (!s.empty()) s += "+";
    s += name;
  }
  return s.empty() ? "none" : s;
}

GeneratorStackImpl::GeneratorStackImpl(ModelConfig cfg, SkeletonGraph graph, bool factorized)
    : cfg_(std::move(cfg)),
      graph_(std::move(graph)),
      factorized_(factorized),
      trajectory_latent_(GPLatentConfig::with_ladder(cfg_.generator.trajectory_noise, cfg_.generator.t0)),
      pose_latent_(GPLatentConfig::with_ladder(cfg_.generator.pose_noise, cfg_.generator.t0)) {
  cfg_.validate();
  const int64_t c = cfg_.encoder.feature_channels;
  encoder = register_module("encoder", SceneEncoder(cfg_.encoder));
  if (factorized_) {
    trajectory = register_module("trajectory", TrajectoryGenerator(cfg_.generator, c, graph_.joint_count()));
    pose = register_module("pose", PoseGenerator(cfg_.generator, graph_, c));
  } else {
    joint = register_module("joint", JointGenerator(cfg_.generator, graph_, c));
  }
}

torch::Tensor GeneratorStackImpl::sample_trajectory_latent(int64_t batch, at::Generator& gen) const {
  return trajectory_latent_.sample(batch, gen).to(torch::kFloat32);
}

torch::Tensor GeneratorStackImpl::sample_pose_latent(int64_t batch, at::Generator& gen) const {
  return pose_latent_.sample(batch, gen).to(torch::kFloat32);
}

GeneratedMotion GeneratorStackImpl::forward(const torch::Tensor& image,
                                            const torch::Tensor& initial_pose, at::Generator& gen) {
  const int64_t batch = image.size(0);
  torch::Tensor zt;
  if (factorized_) zt = sample_trajectory_latent(batch, gen);
  auto zp = sample_pose_latent(batch, gen);
  return forward_latent(image, initial_pose, zt, zp);
}

GeneratedMotion GeneratorStackImpl::forward_latent(const torch::Tensor& image,
                                                   const torch::Tensor& initial_pose,
                                                   const torch::Tensor& z_trajectory,
                                                   const torch::Tensor& z_pose) {
  return forward_latent(encoder->encode(image), initial_pose, z_trajectory, z_pose);
}

GeneratedMotion GeneratorStackImpl::forward_latent(const SceneFeature& scene,
                                                   const torch::Tensor& initial_pose,
                                                   const torch::Tensor& z_trajectory,
                                                   const torch::Tensor& z_pose) {
  GeneratedMotion out;
  out.scene = scene;
  if (factorized_) {
    out.trajectory = trajectory->forward(z_trajectory, scene.f_scene, initial_pose);
    out.pose = pose->forward(z_pose, scene.f_scene, out.trajectory.positions, initial_pose);
  } else {
    std::tie(out.trajectory, out.pose) = joint->forward(z_pose, scene.f_scene, initial_pose);
  }
  auto motion = compose_motion(out.pose, out.trajectory);
  auto anchor = initial_pose.select(2, graph_.root_index());
  out.joints = translate(motion.joints, anchor);
  return out;
}

CriticSetImpl::CriticSetImpl(const ModelConfig& cfg, const SkeletonGraph& graph,
                             const AblationFlags& flags) {
  const int64_t c = cfg.encoder.feature_channels;
  if (flags.trajectory)
    trajectory = register_module("trajectory", TrajectoryCritic(cfg.critic, c, graph.joint_count()));
  if (flags.pose) pose = register_module("pose", PoseCritic(cfg.critic, graph, c));
  if (flags.projection) projection = register_module("projection", ProjectionCritic(cfg.critic, graph, c));
  if (flags.context) {
    const auto n = static_cast<int64_t>(crop_frame_indices(cfg.frames() + 1, cfg.critic.crop_interval).size());
    context = register_module("context", ContextCritic(cfg.critic, n));
  }
}

CriticInputs build_critic_inputs(const torch::Tensor& joints, const torch::Tensor& initial_pose,
                                 const torch::Tensor& depth,
                                 const std::vector<CameraIntrinsics>& cams, int root_index,
                                 const CriticInputOptions& opts) {
  if (joints.dim() != 4 || joints.size(1) != 3 || initial_pose.dim() != 3 ||
      initial_pose.size(0) != joints.size(0) || initial_pose.size(2) != joints.size(2))
    throw ValidationError("critic inputs: joints must be (B, 3, J, T) with initial pose (B, 3, J)");
  const int64_t batch = joints.size(0);
  auto anchor = initial_pose.select(2, root_index);                 // (B, 3)
  auto relative = joints - anchor.unsqueeze(-1).unsqueeze(-1);      // (B, 3, J, T)
  auto root = relative.select(2, root_index);                       // (B, 3, T)
  CriticInputs in;
  in.positions = root.transpose(1, 2);                              // (B, T, 3)
  auto p0 = initial_pose - anchor.unsqueeze(-1);
  auto poses = relative - root.unsqueeze(2);
  in.poses = torch::cat({p0.unsqueeze(-1), poses}, 3);
  in.track = torch::cat({torch::zeros_like(in.positions.narrow(1, 0, 1)), in.positions}, 1);

  if (!opts.projection && !opts.context) return in;
  if (static_cast<int64_t>(cams.size()) != batch)
    throw ValidationError("critic inputs: need one camera per batch element");
  auto absolute = torch::cat({initial_pose.unsqueeze(-1), joints}, 3);  // (B, 3, J, T+1)
  std::vector<torch::Tensor> proj, crops;
  for (int64_t b = 0; b < batch; ++b) {
    if (opts.projection) {
      auto px = project_motion_clamped(cams[b], absolute[b]).pixels;
      proj.push_back(normalize_pixels(cams[b], px));
    }
    if (opts.context) {
      auto track = absolute[b].select(1, root_index).transpose(0, 1).unsqueeze(0);  // (1, T+1, 3)
      // Roots that wander behind the camera are clamped in front of it.
      track = torch::cat({track.narrow(2, 0, 2), track.narrow(2, 2, 1).clamp_min(0.1)}, 2);
      crops.push_back(context_crops(depth[b].unsqueeze(0), cams[b], track, opts.crop_height,
                                    opts.crop_width, opts.crop_interval)
                          .crops);
    }
  }
  if (opts.projection) in.motion2d = torch::stack(proj);
  if (opts.context) in.crops = torch::cat(crops, 0);
  return in;
}

}  // namespace scenemotion
