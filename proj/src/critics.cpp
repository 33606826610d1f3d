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

#include "scenemotion/critics.hpp"

#include <string>

#include "scenemotion/error.hpp"

namespace F = torch::nn::functional;
namespace nn = torch::nn;

namespace scenemotion {

namespace {

torch::Tensor lrelu(const torch::Tensor& x) {
  return F::leaky_relu(x, F::LeakyReLUFuncOptions().negative_slope(0.2));
}

torch::Tensor pool_and_score(const torch::Tensor& x, nn::Linear& head, ShapeTrace* trace) {
  auto pooled = x.mean({2, 3});
  record_shape(trace, "pool", pooled.unsqueeze(-1).unsqueeze(-1));
  return head->forward(pooled).squeeze(-1);
}

}  // namespace

TrajectoryCriticImpl::TrajectoryCriticImpl(const CriticConfig& cfg, int64_t scene_channels,
                                           int64_t joints)
    : scene_channels_(scene_channels), joints_(joints) {
  convs_ = register_module("convs", nn::ModuleList());
  int64_t in = 3 + scene_channels + 3 * joints;
  for (int w : cfg.widths) {
    convs_->push_back(nn::Conv2d(nn::Conv2dOptions(in, w, {1, 3}).padding({0, 1})));
    in = w;
  }
  out_ = register_module("out", nn::Conv2d(nn::Conv2dOptions(in, in, {1, 3}).padding({0, 1})));
  head_ = register_module("head", nn::Linear(in, 1));
}

torch::Tensor TrajectoryCriticImpl::forward(const torch::Tensor& positions,
                                            const torch::Tensor& f_scene,
                                            const torch::Tensor& initial_pose, ShapeTrace* trace) {
  if (positions.dim() != 3 || positions.size(2) != 3)
    throw ValidationError("score_trajectory: positions must be (B, T, 3)");
  const int64_t batch = positions.size(0);
  const int64_t frames = positions.size(1);
  if (f_scene.dim() != 2 || f_scene.size(0) != batch || f_scene.size(1) != scene_channels_ ||
      initial_pose.dim() != 3 || initial_pose.size(0) != batch || initial_pose.size(2) != joints_)
    throw ValidationError("score_trajectory: condition shapes do not match the critic");
  auto cond = torch::cat({f_scene, initial_pose.reshape({batch, -1})}, 1);
  auto x = torch::cat({positions.transpose(1, 2).unsqueeze(2), tile_condition(cond, 1, frames)}, 1);
  record_shape(trace, "input", x);
  for (size_t s = 0; s < convs_->size(); ++s) {
    x = convs_[s]->as<nn::Conv2d>()->forward(lrelu(x));
    if (s > 0) x = downsample_time(x);
    record_shape(trace, "stage" + std::to_string(s + 1), x);
  }
  x = out_->forward(lrelu(x));
  return pool_and_score(x, head_, trace);
}

GraphCriticImpl::GraphCriticImpl(const CriticConfig& cfg, const SkeletonGraph& graph,
                                 int64_t in_channels) {
  convs_ = register_module("convs", nn::ModuleList());
  downs_ = register_module("downs", nn::ModuleList());
  const int stages = static_cast<int>(cfg.widths.size());
  const auto schedule = stage_levels(graph.level_count() - 1, 0, stages);
  int level = graph.level_count() - 1;
  int64_t in = in_channels;
  for (int s = 0; s < stages; ++s) {
    convs_->push_back(STGraphConv(in, cfg.widths[s], normalized_adjacency(graph, level), 3, 1));
    const int next = schedule[s];
    has_down_.push_back(next != level);
    if (next != level) {
      downs_->push_back(GraphDownsample(graph.node_parent(level, next), graph.levels()[next]));
      level = next;
    }
    in = cfg.widths[s];
  }
  out_ = register_module("out", nn::Conv2d(nn::Conv2dOptions(in, in, {1, 3}).padding({0, 1})));
  head_ = register_module("head", nn::Linear(in, 1));
}

torch::Tensor GraphCriticImpl::forward(const torch::Tensor& input, ShapeTrace* trace) {
  auto x = input;
  size_t down = 0;
  for (size_t s = 0; s < convs_->size(); ++s) {
    x = convs_[s]->as<STGraphConv>()->forward(lrelu(x));
    if (has_down_[s]) x = downs_[down++]->as<GraphDownsample>()->forward(x);
    if (s > 0) x = downsample_time(x);
    record_shape(trace, "stage" + std::to_string(s + 1), x);
  }
  x = out_->forward(lrelu(x));
  return pool_and_score(x, head_, trace);
}

PoseCriticImpl::PoseCriticImpl(const CriticConfig& cfg, const SkeletonGraph& graph,
                               int64_t scene_channels)
    : scene_channels_(scene_channels), joints_(graph.joint_count()) {
  body_ = register_module("body", GraphCritic(cfg, graph, 3 + scene_channels + 3));
}

torch::Tensor PoseCriticImpl::forward(const torch::Tensor& poses, const torch::Tensor& trajectory,
                                      const torch::Tensor& f_scene, ShapeTrace* trace) {
  if (poses.dim() != 4 || poses.size(1) != 3 || poses.size(2) != joints_)
    throw ValidationError("score_pose: poses must be (B, 3, J, T+1)");
  const int64_t batch = poses.size(0);
  const int64_t frames = poses.size(3);
  if (trajectory.dim() != 3 || trajectory.size(0) != batch || trajectory.size(1) != frames ||
      trajectory.size(2) != 3)
    throw ValidationError("score_pose: trajectory must be (B, T+1, 3) matching the poses");
  if (f_scene.dim() != 2 || f_scene.size(0) != batch || f_scene.size(1) != scene_channels_)
    throw ValidationError("score_pose: scene feature shape mismatch");
  auto traj = trajectory.transpose(1, 2).unsqueeze(2).expand({batch, 3, joints_, frames});
  auto x = torch::cat({traj, tile_condition(f_scene, joints_, frames), poses}, 1);
  record_shape(trace, "input", x);
  return body_->forward(x, trace);
}

ProjectionCriticImpl::ProjectionCriticImpl(const CriticConfig& cfg, const SkeletonGraph& graph,
                                           int64_t scene_channels)
    : scene_channels_(scene_channels), joints_(graph.joint_count()) {
  body_ = register_module("body", GraphCritic(cfg, graph, 2 + scene_channels));
}

torch::Tensor ProjectionCriticImpl::forward(const torch::Tensor& motion2d,
                                            const torch::Tensor& f_scene, ShapeTrace* trace) {
  if (motion2d.dim() != 4 || motion2d.size(1) != 2 || motion2d.size(2) != joints_)
    throw ValidationError("score_projection: 2D motion must be (B, 2, J, T+1)");
  const int64_t batch = motion2d.size(0);
  if (f_scene.dim() != 2 || f_scene.size(0) != batch || f_scene.size(1) != scene_channels_)
    throw ValidationError("score_projection: scene feature shape mismatch");
  auto x = torch::cat({motion2d, tile_condition(f_scene, joints_, motion2d.size(3))}, 1);
  record_shape(trace, "input", x);
  return body_->forward(x, trace);
}

ContextCriticImpl::ContextCriticImpl(const CriticConfig& cfg, int64_t n_crops) : n_crops_(n_crops) {
  convs_ = register_module("convs", nn::ModuleList());
  int64_t in = n_crops;
  for (size_t s = 0; s + 1 < cfg.context_widths.size(); ++s) {
    const int64_t w = cfg.context_widths[s];
    convs_->push_back(nn::Conv2d(nn::Conv2dOptions(in, w, 3).padding(1)));
    in = w;
  }
  const int64_t width = cfg.context_widths.back();
  out_ = register_module("out", nn::Conv2d(nn::Conv2dOptions(in, width, 3).padding(1)));
  head_ = register_module("head", nn::Linear(width, 1));
}

torch::Tensor ContextCriticImpl::forward(const torch::Tensor& crops, ShapeTrace* trace) {
  if (crops.dim() != 4 || crops.size(1) != n_crops_)
    throw ValidationError("score_context: expected (B, " + std::to_string(n_crops_) +
                          ", Hc, Wc) crops, got " + std::to_string(crops.dim() == 4 ? crops.size(1) : -1) +
                          " crops");
  auto x = crops;
  record_shape(trace, "input", x);
  for (size_t s = 0; s < convs_->size(); ++s) {
    x = convs_[s]->as<nn::Conv2d>()->forward(lrelu(x));
    x = F::avg_pool2d(x, F::AvgPool2dFuncOptions(2));
    record_shape(trace, "stage" + std::to_string(s + 1), x);
  }
  x = out_->forward(lrelu(x));
  return pool_and_score(x, head_, trace);
}

}  // namespace scenemotion
