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

#include "scenemotion/scene_geometry.hpp"

namespace scenemotion {

/// Relative depth crops around a root track, d_t already subtracted.
struct ContextCropSequence {
  torch::Tensor crops;        // (B, n_crops, Hc, Wc)
  std::vector<int64_t> frames;
};

/// Frames 0, interval, 2*interval, ... up to (and including) frames - 1.
/// With 65 frames and interval 8 this yields 9 crops.
std::vector<int64_t> crop_frame_indices(int64_t frames, int64_t interval = 8);

/// Bilinearly resampled crop of `depth` around the projection of `root`.
///
/// The footprint spans (crop_h / d, crop_w / d) pixels where d = root.z, is
/// centred on the projected root, and is resampled onto a (crop_h, crop_w)
/// grid; d is then subtracted from every sample. Samples outside the image
/// take the nearest edge value. Differentiable with respect to `root`.
///
/// depth: (H, W) or (B, H, W); root: (3) or (B, n, 3). Returns (crop_h, crop_w)
/// or (B, n, crop_h, crop_w) respectively.
torch::Tensor relative_depth_crop(const torch::Tensor& depth, const CameraIntrinsics& cam,
                                  const torch::Tensor& root, int64_t crop_h, int64_t crop_w);

/// Crops for every `interval`-th frame of a (B, T, 3) root track.
ContextCropSequence context_crops(const torch::Tensor& depth, const CameraIntrinsics& cam,
                                  const torch::Tensor& root_track, int64_t crop_h,
                                  int64_t crop_w, int64_t interval = 8);

}  // namespace scenemotion
