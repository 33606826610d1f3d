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

#include <cstdint>
#include <filesystem>
#include <string>

#include "scenemotion/model.hpp"

namespace scenemotion {

/// A checkpoint directory holds `checkpoint.json` (model config, tensor
/// names, shapes and float offsets) and `weights.bin`, every parameter and
/// buffer as little-endian float32 concatenated in manifest order.
struct CheckpointInfo {
  ModelConfig model;
  bool factorized = true;
  int64_t step = 0;
  uint64_t seed = 0;
};

void save_checkpoint(const std::filesystem::path& dir, GeneratorStack& stack, int64_t step,
                     uint64_t seed);
CheckpointInfo read_checkpoint_info(const std::filesystem::path& dir);
/// Rebuilds the stack from the stored config and loads every tensor.
GeneratorStack load_checkpoint(const std::filesystem::path& dir, CheckpointInfo* info = nullptr);

/// Order-sensitive hash of the raw bytes of a set of tensors.
uint64_t tensor_hash(const std::vector<torch::Tensor>& tensors);

}  // namespace scenemotion
