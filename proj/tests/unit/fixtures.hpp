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

#include "scenemotion/dataset.hpp"

namespace testing {

/// Scene settings with a sparse collision cloud so fixtures stay fast.
inline scenemotion::SceneConfig quick_scene_config() {
  scenemotion::SceneConfig c;
  c.cloud_supersample = 1;
  c.cloud_stride = 1;
  return c;
}

/// Two scenes with three walks each, generated once per test binary.
inline const scenemotion::Dataset& tiny_dataset() {
  static const scenemotion::Dataset data =
      scenemotion::generate_dataset(3, 2, 3, quick_scene_config(), scenemotion::WalkConfig{}, 1);
  return data;
}

}  // namespace testing

namespace testing {

/// Ground-truth walks spread over the tiny dataset's scenes, with the scene
/// index of each, generated once per test binary.
struct WalkSet {
  std::vector<torch::Tensor> motions;
  std::vector<int> scenes;
};

inline const WalkSet& walk_set() {
  static const WalkSet set = [] {
    WalkSet s;
    const auto& data = tiny_dataset();
    const auto graph = scenemotion::SkeletonGraph::default19();
    for (int i = 0; i < 60; ++i) {
      const int scene = i % static_cast<int>(data.scenes.size());
      s.motions.push_back(scenemotion::generate_walk(data.scenes[scene], graph, 1000 + i));
      s.scenes.push_back(scene);
    }
    return s;
  }();
  return set;
}

}  // namespace testing
