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

#include "scenemotion/scene_encoder.hpp"

#include "scenemotion/error.hpp"

namespace F = torch::nn::functional;
namespace nn = torch::nn;

namespace scenemotion {

namespace {

nn::Conv2d conv(int64_t in, int64_t out, int64_t k, int64_t stride = 1) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, k).stride(stride).padding(k / 2));
}

torch::Tensor lrelu(const torch::Tensor& x) { return F::leaky_relu(x, F::LeakyReLUFuncOptions().negative_slope(0.2)); }

}  // namespace

ResidualBlockImpl::ResidualBlockImpl(int64_t in_channels, int64_t out_channels, int64_t stride) {
  conv1_ = register_module("conv1", conv(in_channels, out_channels, 3, stride));
  bn1_ = register_module("bn1", nn::BatchNorm2d(out_channels));
  conv2_ = register_module("conv2", conv(out_channels, out_channels, 3));
  bn2_ = register_module("bn2", nn::BatchNorm2d(out_channels));
  shortcut_ = register_module("shortcut", conv(in_channels, out_channels, 1, stride));
  bn_shortcut_ = register_module("bn_shortcut", nn::BatchNorm2d(out_channels));
}

torch::Tensor ResidualBlockImpl::forward(const torch::Tensor& x) {
  auto y = lrelu(bn1_->forward(conv1_->forward(x)));
  y = bn2_->forward(conv2_->forward(y));
  return lrelu(y + bn_shortcut_->forward(shortcut_->forward(x)));
}

SceneEncoderImpl::SceneEncoderImpl(EncoderConfig cfg) : cfg_(std::move(cfg)) {
  const auto& w = cfg_.widths;
  stem_ = register_module("stem", conv(3, w[0], 3, 2));
  stem_bn_ = register_module("stem_bn", nn::BatchNorm2d(w[0]));
  stage1_ = register_module("stage1", ResidualBlock(w[0], w[1], 2));
  stage2_ = register_module("stage2", ResidualBlock(w[1], w[2], 2));
  stage3_ = register_module("stage3", ResidualBlock(w[2], w[3], 2));
  feature_proj_ = register_module("feature_proj", conv(w[3], cfg_.feature_channels, 1));
  depth_reduce_ = register_module("depth_reduce", conv(w[3], w[1], 3));
  depth_fuse_ = register_module("depth_fuse", conv(2 * w[1], w[1], 3));
  depth_out_ = register_module("depth_out", conv(w[1], 1, 3));
}

SceneFeature SceneEncoderImpl::encode(const torch::Tensor& image, ShapeTrace* trace) {
  auto x = image.dim() == 3 ? image.unsqueeze(0) : image;
  if (x.dim() != 4 || x.size(1) != 3 || x.size(2) != cfg_.image_height ||
      x.size(3) != cfg_.image_width)
    throw ValidationError("encode_scene: expected (B, 3, " + std::to_string(cfg_.image_height) +
                          ", " + std::to_string(cfg_.image_width) + ") image");
  record_shape(trace, "image", x);
  auto s0 = lrelu(stem_bn_->forward(stem_->forward(x)));
  auto s1 = stage1_->forward(s0);
  auto s2 = stage2_->forward(s1);
  auto s3 = stage3_->forward(s2);
  record_shape(trace, "feature_map", s3);
  auto pooled = feature_proj_->forward(s3).mean({2, 3});
  record_shape(trace, "scene_context", pooled.unsqueeze(-1).unsqueeze(-1));
  return {pooled, s3, s1};
}

torch::Tensor SceneEncoderImpl::predict_depth(const SceneFeature& feature) {
  auto y = lrelu(depth_reduce_->forward(feature.feature_map));
  y = F::interpolate(y, F::InterpolateFuncOptions()
                            .size(std::vector<int64_t>{feature.skip.size(2), feature.skip.size(3)})
                            .mode(torch::kBilinear)
                            .align_corners(false));
  y = lrelu(depth_fuse_->forward(torch::cat({y, feature.skip}, 1)));
  y = depth_out_->forward(y);
  y = F::interpolate(y, F::InterpolateFuncOptions()
                            .size(std::vector<int64_t>{cfg_.image_height, cfg_.image_width})
                            .mode(torch::kBilinear)
                            .align_corners(false));
  // softplus keeps the prediction strictly positive
  return (F::softplus(y) + 1e-3).squeeze(1);
}

std::vector<torch::Tensor> SceneEncoderImpl::depth_head_parameters() const {
  std::vector<torch::Tensor> out;
  for (const auto* m : {&depth_reduce_, &depth_fuse_, &depth_out_}) {
    for (const auto& p : (*m)->parameters()) out.push_back(p);
  }
  return out;
}

torch::Tensor berhu_loss(const torch::Tensor& pred, const torch::Tensor& target,
                         const torch::Tensor& valid) {
  if (pred.sizes() != target.sizes() || pred.sizes() != valid.sizes())
    throw ValidationError("berhu_loss: prediction, target and mask shapes differ");
  auto mask = valid.to(torch::kBool);
  const auto count = mask.sum().item<int64_t>();
  if (count == 0) throw ValidationError("berhu_loss: empty validity mask");
  auto r = (pred - target.to(pred.dtype())).masked_select(mask);
  auto abs_r = r.abs();
  const double c = 0.2 * abs_r.max().item<double>();
  if (c == 0.0) return abs_r.mean();
  auto quadratic = (r * r + c * c) / (2.0 * c);
  return torch::where(abs_r <= c, abs_r, quadratic).mean();
}

torch::Tensor berhu_loss(const torch::Tensor& pred, const torch::Tensor& target) {
  return berhu_loss(pred, target, torch::ones(pred.sizes(), torch::kBool));
}

}  // namespace scenemotion
