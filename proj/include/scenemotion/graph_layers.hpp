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

#include <string>
#include <utility>
#include <vector>

#include "scenemotion/skeleton.hpp"

namespace scenemotion {

/// (label, shape without the batch dimension) per recorded stage.
using ShapeTrace = std::vector<std::pair<std::string, std::vector<int64_t>>>;

void record_shape(ShapeTrace* trace, const std::string& label, const torch::Tensor& t);

/// D^-1/2 (A + I) D^-1/2 over the nodes of one coarsening level, float (N, N).
torch::Tensor normalized_adjacency(const SkeletonGraph& graph, int level);

/// Level index reached after each of `stages` stages walking the ladder from
/// `from_level` to `to_level`, with transitions spread evenly. On the default
/// skeleton five stages from 1 to 19 nodes visit 5, 5, 11, 11, 19; the
/// reverse visits 11, 11, 5, 5, 1.
std::vector<int> stage_levels(int from_level, int to_level, int stages);

/// Spatio-temporal graph convolution on (B, C, N, T): each node mixes its own
/// features with the normalized neighbourhood average, then a (1, k) temporal
/// convolution maps 2C -> C_out.
class STGraphConvImpl : public torch::nn::Module {
 public:
  STGraphConvImpl(int64_t in_channels, int64_t out_channels, torch::Tensor adjacency,
                  int64_t temporal_kernel = 3, int64_t temporal_padding = 1);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::Tensor adjacency_;
  torch::nn::Conv2d conv_{nullptr};
};
TORCH_MODULE(STGraphConv);

/// Coarse -> fine nodes: each fine node copies its parent, scaled by a
/// learnable per-node gain, plus a learnable per-node, per-channel offset
/// that lets siblings diverge.
class GraphUpsampleImpl : public torch::nn::Module {
 public:
  GraphUpsampleImpl(std::vector<int> parent, int64_t channels);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::Tensor parent_;
  torch::Tensor gain_;
  torch::Tensor offset_;
};
TORCH_MODULE(GraphUpsample);

/// Fine -> coarse nodes by averaging the children of each coarse node.
class GraphDownsampleImpl : public torch::nn::Module {
 public:
  GraphDownsampleImpl(const std::vector<int>& parent, int64_t coarse_nodes);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::Tensor pool_;  // (N_fine, N_coarse)
};
TORCH_MODULE(GraphDownsample);

/// Nearest-neighbour doubling along the last (time) axis.
torch::Tensor upsample_time(const torch::Tensor& x);
/// Average of adjacent frame pairs along the last axis; odd lengths drop the tail.
torch::Tensor downsample_time(const torch::Tensor& x);

/// Repeat a (B, C) condition over nodes and time: (B, C, nodes, frames).
torch::Tensor tile_condition(const torch::Tensor& cond, int64_t nodes, int64_t frames);

}  // namespace scenemotion
