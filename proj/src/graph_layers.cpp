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

#include "scenemotion/graph_layers.hpp"

#include <cmath>

#include "scenemotion/error.hpp"

namespace F = torch::nn::functional;

namespace scenemotion {

void record_shape(ShapeTrace* trace, const std::string& label, const torch::Tensor& t) {
  if (trace == nullptr) return;
  auto sizes = t.sizes().vec();
  sizes.erase(sizes.begin());
  trace->emplace_back(label, std::move(sizes));
}

torch::Tensor normalized_adjacency(const SkeletonGraph& graph, int level) {
  const int n = graph.levels().at(level);
  auto a = torch::eye(n, torch::kFloat);
  for (const auto& [u, v] : graph.level_edges(level)) {
    a[u][v] = 1.0f;
    a[v][u] = 1.0f;
  }
  auto inv_sqrt = a.sum(1).rsqrt();
  return inv_sqrt.unsqueeze(1) * a * inv_sqrt.unsqueeze(0);
}

std::vector<int> stage_levels(int from_level, int to_level, int stages) {
  if (stages < 1) throw ConfigError("stage_levels: need at least one stage");
  std::vector<int> out;
  const double span = to_level - from_level;
  for (int s = 1; s <= stages; ++s) {
    out.push_back(from_level + static_cast<int>(std::lround(s * span / stages)));
  }
  return out;
}

STGraphConvImpl::STGraphConvImpl(int64_t in_channels, int64_t out_channels,
                                 torch::Tensor adjacency, int64_t temporal_kernel,
                                 int64_t temporal_padding) {
  adjacency_ = register_buffer("adjacency", std::move(adjacency));
  conv_ = register_module(
      "conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(2 * in_channels, out_channels,
                                                         {1, temporal_kernel})
                                    .padding({0, temporal_padding})));
}

torch::Tensor STGraphConvImpl::forward(const torch::Tensor& x) {
  auto neighbours = torch::einsum("bcnt,nm->bcmt", {x, adjacency_});
  return conv_->forward(torch::cat({x, neighbours}, 1));
}

GraphUpsampleImpl::GraphUpsampleImpl(std::vector<int> parent, int64_t channels) {
  const auto fine = static_cast<int64_t>(parent.size());
  std::vector<int64_t> idx(parent.begin(), parent.end());
  parent_ = register_buffer("parent", torch::tensor(idx, torch::kLong));
  gain_ = register_parameter("gain", torch::ones({1, 1, fine, 1}));
  offset_ = register_parameter("offset", torch::randn({1, channels, fine, 1}) * 0.1);
}

torch::Tensor GraphUpsampleImpl::forward(const torch::Tensor& x) {
  return x.index_select(2, parent_.to(torch::kLong)) * gain_ + offset_;
}

GraphDownsampleImpl::GraphDownsampleImpl(const std::vector<int>& parent, int64_t coarse_nodes) {
  const auto fine = static_cast<int64_t>(parent.size());
  auto pool = torch::zeros({fine, coarse_nodes}, torch::kFloat);
  std::vector<float> counts(coarse_nodes, 0.0f);
  for (int64_t f = 0; f < fine; ++f) counts.at(parent[f]) += 1.0f;
  for (int64_t f = 0; f < fine; ++f) pool[f][parent[f]] = 1.0f / counts[parent[f]];
  pool_ = register_buffer("pool", pool);
}

torch::Tensor GraphDownsampleImpl::forward(const torch::Tensor& x) {
  return torch::einsum("bcft,fk->bckt", {x, pool_});
}

torch::Tensor upsample_time(const torch::Tensor& x) { return x.repeat_interleave(2, -1); }

torch::Tensor downsample_time(const torch::Tensor& x) {
  return F::avg_pool2d(x, F::AvgPool2dFuncOptions({1, 2}).stride({1, 2}));
}

torch::Tensor tile_condition(const torch::Tensor& cond, int64_t nodes, int64_t frames) {
  return cond.unsqueeze(-1).unsqueeze(-1).expand({cond.size(0), cond.size(1), nodes, frames});
}

}  // namespace scenemotion
