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

#include "scenemotion/generators.hpp"

#include <string>

#include "scenemotion/error.hpp"

namespace F = torch::nn::functional;
namespace nn = torch::nn;

namespace scenemotion {

namespace {

torch::Tensor lrelu(const torch::Tensor& x) {
  return F::leaky_relu(x, F::LeakyReLUFuncOptions().negative_slope(0.2));
}

void check_latent(const torch::Tensor& z, int64_t channels, int64_t length, const char* who) {
  if (z.dim() != 3 || z.size(1) != channels || z.size(2) != length)
    throw ValidationError(std::string(who) + ": latent must be (B, " + std::to_string(channels) +
                          ", " + std::to_string(length) + ")");
}

void check_condition(const torch::Tensor& f_scene, const torch::Tensor& initial_pose,
                     int64_t batch, int64_t scene_channels, int64_t joints, const char* who) {
  if (f_scene.dim() != 2 || f_scene.size(0) != batch || f_scene.size(1) != scene_channels)
    throw ValidationError(std::string(who) + ": scene feature must be (B, " +
                          std::to_string(scene_channels) + ")");
  if (initial_pose.dim() != 3 || initial_pose.size(0) != batch || initial_pose.size(1) != 3 ||
      initial_pose.size(2) != joints)
    throw ValidationError(std::string(who) + ": initial pose must be (B, 3, " +
                          std::to_string(joints) + ")");
}

}  // namespace

TrajectoryGeneratorImpl::TrajectoryGeneratorImpl(GeneratorConfig cfg, int64_t scene_channels,
                                                 int64_t joints)
    : cfg_(std::move(cfg)), scene_channels_(scene_channels), joints_(joints) {
  cfg_.validate();
  convs_ = register_module("convs", nn::ModuleList());
  norms_ = register_module("norms", nn::ModuleList());
  int64_t in = cfg_.trajectory_noise + scene_channels_ + 3 * joints_;
  for (size_t s = 0; s < cfg_.trajectory_widths.size(); ++s) {
    const int64_t out = cfg_.trajectory_widths[s];
    const int64_t pad = s == 0 ? 0 : 1;
    convs_->push_back(nn::Conv2d(nn::Conv2dOptions(in, out, {1, 3}).padding({0, pad})));
    norms_->push_back(nn::BatchNorm2d(out));
    in = out;
  }
  out_ = register_module("out", nn::Conv2d(nn::Conv2dOptions(in, 3, {1, 3}).padding({0, 1})));
}

Trajectory TrajectoryGeneratorImpl::forward(const torch::Tensor& z, const torch::Tensor& f_scene,
                                            const torch::Tensor& initial_pose, ShapeTrace* trace) {
  check_latent(z, cfg_.trajectory_noise, cfg_.t0, "generate_trajectory");
  const int64_t batch = z.size(0);
  check_condition(f_scene, initial_pose, batch, scene_channels_, joints_, "generate_trajectory");

  auto cond = torch::cat({f_scene, initial_pose.reshape({batch, -1})}, 1);
  auto x = torch::cat({z.unsqueeze(2), tile_condition(cond, 1, cfg_.t0)}, 1);
  record_shape(trace, "input", x);
  for (size_t s = 0; s < convs_->size(); ++s) {
    x = convs_[s]->as<nn::Conv2d>()->forward(lrelu(x));
    x = norms_[s]->as<nn::BatchNorm2d>()->forward(x);
    if (s > 0) x = upsample_time(x);
    record_shape(trace, "stage" + std::to_string(s + 1), x);
  }
  x = torch::tanh(out_->forward(lrelu(x))) * cfg_.alpha;
  record_shape(trace, "output", x);
  // (B, 3, 1, T) -> (B, T, 3)
  auto velocities = x.squeeze(2).transpose(1, 2);
  return integrate_velocities(velocities);
}

GraphGeneratorImpl::GraphGeneratorImpl(const SkeletonGraph& graph, int64_t in_channels,
                                       const std::vector<int>& widths) {
  const int stages = static_cast<int>(widths.size());
  stage_level_ = stage_levels(0, graph.level_count() - 1, stages);
  convs_ = register_module("convs", nn::ModuleList());
  ups_ = register_module("ups", nn::ModuleList());
  norms_ = register_module("norms", nn::ModuleList());
  int level = 0;
  int64_t in = in_channels;
  for (int s = 0; s < stages; ++s) {
    const int64_t out = widths[s];
    const int64_t pad = s == 0 ? 0 : 1;
    convs_->push_back(STGraphConv(in, out, normalized_adjacency(graph, level), 3, pad));
    const int next = stage_level_[s];
    has_up_.push_back(next != level);
    if (next != level) {
      ups_->push_back(GraphUpsample(graph.node_parent(next, level), out));
      level = next;
    }
    norms_->push_back(nn::BatchNorm2d(out));
    in = out;
  }
  out_ = register_module("out", STGraphConv(in, 3, normalized_adjacency(graph, level), 3, 1));
}

torch::Tensor GraphGeneratorImpl::forward(const torch::Tensor& input, ShapeTrace* trace) {
  auto x = input;
  size_t up = 0;
  for (size_t s = 0; s < convs_->size(); ++s) {
    x = convs_[s]->as<STGraphConv>()->forward(lrelu(x));
    if (has_up_[s]) x = ups_[up++]->as<GraphUpsample>()->forward(x);
    if (s > 0) x = upsample_time(x);
    x = norms_[s]->as<nn::BatchNorm2d>()->forward(x);
    record_shape(trace, "stage" + std::to_string(s + 1), x);
  }
  return out_->forward(lrelu(x));
}

PoseGeneratorImpl::PoseGeneratorImpl(GeneratorConfig cfg, const SkeletonGraph& graph,
                                     int64_t scene_channels)
    : cfg_(std::move(cfg)), graph_(graph), scene_channels_(scene_channels) {
  cfg_.validate();
  const int64_t in = cfg_.pose_noise + scene_channels_ + 3 * cfg_.output_length() +
                     3 * graph_.joint_count();
  body_ = register_module("body", GraphGenerator(graph_, in, cfg_.pose_widths));
}

PoseSequence PoseGeneratorImpl::forward(const torch::Tensor& z, const torch::Tensor& f_scene,
                                        const torch::Tensor& trajectory,
                                        const torch::Tensor& initial_pose, ShapeTrace* trace) {
  check_latent(z, cfg_.pose_noise, cfg_.t0, "generate_pose");
  const int64_t batch = z.size(0);
  check_condition(f_scene, initial_pose, batch, scene_channels_, graph_.joint_count(),
                  "generate_pose");
  const int64_t frames = cfg_.output_length();
  if (trajectory.dim() != 3 || trajectory.size(0) != batch || trajectory.size(1) != frames ||
      trajectory.size(2) != 3)
    throw ValidationError("generate_pose: trajectory must be (B, " + std::to_string(frames) +
                          ", 3)");

  // Whole trajectory flattened channel-major, i.e. (3, T) -> 3T.
  auto flat_traj = trajectory.transpose(1, 2).reshape({batch, -1});
  auto cond = torch::cat({f_scene, flat_traj, initial_pose.reshape({batch, -1})}, 1);
  auto x = torch::cat({z.unsqueeze(2), tile_condition(cond, 1, cfg_.t0)}, 1);
  record_shape(trace, "input", x);
  auto raw = torch::tanh(body_->forward(x, trace));
  record_shape(trace, "output", raw);
  auto root = raw.narrow(2, graph_.root_index(), 1);
  return PoseSequence{raw - root};
}

JointGeneratorImpl::JointGeneratorImpl(GeneratorConfig cfg, const SkeletonGraph& graph,
                                       int64_t scene_channels)
    : cfg_(std::move(cfg)), graph_(graph), scene_channels_(scene_channels) {
  cfg_.validate();
  const int64_t in = cfg_.pose_noise + scene_channels_ + 3 * graph_.joint_count();
  body_ = register_module(
      "body", GraphGenerator(graph_.with_pseudo_node(), in, cfg_.pose_widths));
}

std::pair<Trajectory, PoseSequence> JointGeneratorImpl::forward(const torch::Tensor& z,
                                                                const torch::Tensor& f_scene,
                                                                const torch::Tensor& initial_pose,
                                                                ShapeTrace* trace) {
  check_latent(z, cfg_.pose_noise, cfg_.t0, "generate_joint");
  const int64_t batch = z.size(0);
  const int64_t joints = graph_.joint_count();
  check_condition(f_scene, initial_pose, batch, scene_channels_, joints, "generate_joint");
  auto cond = torch::cat({f_scene, initial_pose.reshape({batch, -1})}, 1);
  auto x = torch::cat({z.unsqueeze(2), tile_condition(cond, 1, cfg_.t0)}, 1);
  record_shape(trace, "input", x);
  auto raw = body_->forward(x, trace);
  record_shape(trace, "output", raw);
  auto body = torch::tanh(raw.narrow(2, 0, joints));
  auto velocities = (torch::tanh(raw.select(2, joints)) * cfg_.alpha).transpose(1, 2);
  auto root = body.narrow(2, graph_.root_index(), 1);
  return {integrate_velocities(velocities), PoseSequence{body - root}};
}

}  // namespace scenemotion
