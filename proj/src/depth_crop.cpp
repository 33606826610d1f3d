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

#include "scenemotion/depth_crop.hpp"

#include "scenemotion/error.hpp"

namespace F = torch::nn::functional;

namespace scenemotion {

std::vector<int64_t> crop_frame_indices(int64_t frames, int64_t interval) {
  if (interval < 1) throw ConfigError("crop schedule: interval must be >= 1");
  std::vector<int64_t> idx;
  for (int64_t t = 0; t < frames; t += interval) idx.push_back(t);
  return idx;
}

namespace {

torch::Tensor crop_batched(const torch::Tensor& depth, const CameraIntrinsics& cam,
                           const torch::Tensor& roots, int64_t crop_h, int64_t crop_w) {
  // depth (B, H, W), roots (B, n, 3)
  if (depth.dim() != 3 || roots.dim() != 3 || roots.size(-1) != 3 ||
      depth.size(0) != roots.size(0))
    throw ValidationError("relative_depth_crop: expected depth (B, H, W) and roots (B, n, 3)");
  if (crop_h < 1 || crop_w < 1) throw ConfigError("relative_depth_crop: crop size must be positive");

  const int64_t batch = roots.size(0);
  const int64_t n = roots.size(1);
  const int64_t height = depth.size(1);
  const int64_t width = depth.size(2);

  auto d = roots.select(-1, 2);  // (B, n)
  if (!(d > 0).all().item<bool>())
    throw ValidationError("relative_depth_crop: root depth must be positive");

  auto opts = roots.options();
  auto u0 = roots.select(-1, 0) / d * cam.fx + cam.cx;
  auto v0 = roots.select(-1, 1) / d * cam.fy + cam.cy;

  // Sample offsets in units of output pixels; divide by d to get the footprint.
  auto cols = torch::arange(crop_w, opts) - static_cast<double>(crop_w / 2);
  auto rows = torch::arange(crop_h, opts) - static_cast<double>(crop_h / 2);
  auto inv_d = (1.0 / d).unsqueeze(-1).unsqueeze(-1);                          // (B, n, 1, 1)
  auto u = u0.unsqueeze(-1).unsqueeze(-1) + cols.view({1, 1, 1, crop_w}) * inv_d;  // (B, n, 1, Wc)
  auto v = v0.unsqueeze(-1).unsqueeze(-1) + rows.view({1, 1, crop_h, 1}) * inv_d;  // (B, n, Hc, 1)
  u = u.expand({batch, n, crop_h, crop_w});
  v = v.expand({batch, n, crop_h, crop_w});

  // align_corners = true: -1 and +1 are the centres of the first and last pixel.
  auto gx = u * (2.0 / std::max<int64_t>(width - 1, 1)) - 1.0;
  auto gy = v * (2.0 / std::max<int64_t>(height - 1, 1)) - 1.0;
  auto grid = torch::stack({gx, gy}, -1).reshape({batch, n * crop_h, crop_w, 2});

  auto src = depth.to(opts.dtype()).unsqueeze(1);  // (B, 1, H, W)
  auto sampled = F::grid_sample(src, grid,
                                F::GridSampleFuncOptions()
                                    .mode(torch::kBilinear)
                                    .padding_mode(torch::kBorder)
                                    .align_corners(true));
  sampled = sampled.view({batch, n, crop_h, crop_w});
  return sampled - d.unsqueeze(-1).unsqueeze(-1);
}

}  // namespace

torch::Tensor relative_depth_crop(const torch::Tensor& depth, const CameraIntrinsics& cam,
                                  const torch::Tensor& root, int64_t crop_h, int64_t crop_w) {
  if (depth.dim() == 2 && root.dim() == 1) {
    return crop_batched(depth.unsqueeze(0), cam, root.view({1, 1, 3}), crop_h, crop_w)
        .squeeze(0)
        .squeeze(0);
  }
  return crop_batched(depth, cam, root, crop_h, crop_w);
}

ContextCropSequence context_crops(const torch::Tensor& depth, const CameraIntrinsics& cam,
                                  const torch::Tensor& root_track, int64_t crop_h,
                                  int64_t crop_w, int64_t interval) {
  if (root_track.dim() != 3 || root_track.size(-1) != 3)
    throw ValidationError("context_crops: root track must be (B, T, 3)");
  auto frames = crop_frame_indices(root_track.size(1), interval);
  auto index = torch::tensor(frames, torch::kLong);
  auto roots = root_track.index_select(1, index);
  return {crop_batched(depth, cam, roots, crop_h, crop_w), std::move(frames)};
}

}  // namespace scenemotion
