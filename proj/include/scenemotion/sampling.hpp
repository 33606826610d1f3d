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

#include "scenemotion/dataset.hpp"
#include "scenemotion/model.hpp"

namespace scenemotion {

/// `n` motions for one scene from one initial pose (3, J), evaluation mode,
/// returned as (n, 3, J, T) float camera-frame joints.
torch::Tensor sample_motions(GeneratorStack& stack, const SyntheticScene& scene,
                             const torch::Tensor& initial_pose, int64_t n, at::Generator& gen);

/// For each listed scene, `per_scene` samples whose initial poses cycle
/// through that scene's ground-truth walks. Scenes are copied so the result
/// is a self-contained dataset.
Dataset sample_dataset(GeneratorStack& stack, const Dataset& data, const std::vector<int>& scenes,
                       int per_scene, uint64_t seed);

}  // namespace scenemotion
