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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenemotion/tensor_io.hpp"
#include "scenemotion/worldgen.hpp"

namespace scenemotion {

/// A ground-truth walk, (3, J, T) camera-frame joints of scene `scene`.
struct MotionRecord {
  int scene = 0;
  uint64_t seed = 0;
  torch::Tensor joints;
};

struct Dataset {
  uint64_t seed = 0;
  int frames = 0;
  std::string skeleton = "default19";
  std::vector<SyntheticScene> scenes;
  std::vector<MotionRecord> motions;
};

struct SceneEntry {
  int id = 0;
  uint64_t seed = 0;
  BlobRef image;
  BlobRef depth;
  BlobRef cloud;
  CameraIntrinsics intrinsics;
  Room room;
  CameraPose pose;
};

struct MotionEntry {
  int id = 0;
  int scene = 0;
  uint64_t seed = 0;
  int frames = 0;
  std::string skeleton = "default19";
  BlobRef motion;
};

struct DatasetManifest {
  int format_version = 1;
  uint64_t seed = 0;
  int frames = 0;
  std::vector<SceneEntry> scenes;
  std::vector<MotionEntry> motions;
};

void to_json(nlohmann::json& j, const DatasetManifest& m);
void from_json(const nlohmann::json& j, DatasetManifest& m);

/// Writes blobs plus `manifest.json` under `dir`.
DatasetManifest write_dataset(const std::filesystem::path& dir, const Dataset& data);
/// Accepts the dataset directory or the manifest path. Verifies every blob's
/// length and checksum.
DatasetManifest read_manifest(const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// Seed for walk `walk` of scene `scene`, derived from the dataset seed.
uint64_t walk_seed(uint64_t seed, int scene, int walk);

/// Scenes are generated concurrently (scene i uses seed + i); output order
/// and content do not depend on `threads`.
Dataset generate_dataset(uint64_t seed, int scenes, int walks_per_scene,
                         const SceneConfig& scene_cfg, const WalkConfig& walk_cfg,
                         int threads = 0);

}  // namespace scenemotion
