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

#include "scenemotion/sampling.hpp"

#include "scenemotion/error.hpp"

namespace scenemotion {

torch::Tensor sample_motions(GeneratorStack& stack, const SyntheticScene& scene,
                             const torch::Tensor& initial_pose, int64_t n, at::Generator& gen) {
  if (n < 1) throw ValidationError("sample: n must be >= 1");
  if (initial_pose.dim() != 2 || initial_pose.size(0) != 3)
    throw ValidationError("sample: initial pose must be (3, J)");
  torch::NoGradGuard no_grad;
  const bool was_training = stack->is_training();
  stack->eval();
  auto image = scene.image.to(torch::kFloat32).unsqueeze(0).expand({n, -1, -1, -1}).contiguous();
  auto p0 = initial_pose.to(torch::kFloat32).unsqueeze(0).expand({n, -1, -1}).contiguous();
  auto out = stack->forward(image, p0, gen).joints;
  stack->train(was_training);
  return out;
}

Dataset sample_dataset(GeneratorStack& stack, const Dataset& data, const std::vector<int>& scenes,
                       int per_scene, uint64_t seed) {
  if (per_scene < 1) throw ValidationError("sample: n must be >= 1");
  auto gen = make_generator(seed);
  Dataset out;
  out.seed = seed;
  out.frames = stack->config().frames();
  out.skeleton = data.skeleton;
  for (int s : scenes) {
    if (s < 0 || s >= static_cast<int>(data.scenes.size()))
      throw ValidationError("sample: scene index " + std::to_string(s) + " out of range");
    std::vector<const MotionRecord*> walks;
    for (const auto& m : data.motions)
      if (m.scene == s) walks.push_back(&m);
    if (walks.empty()) throw ValidationError("sample: scene " + std::to_string(s) + " has no initial poses");
    const int idx = static_cast<int>(out.scenes.size());
    out.scenes.push_back(data.scenes[s]);
    for (int k = 0; k < per_scene; ++k) {
      const auto& walk = *walks[k % walks.size()];
      auto joints = sample_motions(stack, data.scenes[s], walk.joints.select(2, 0), 1, gen);
      out.motions.push_back(MotionRecord{idx, walk.seed, joints[0]});
    }
  }
  return out;
}

}  // namespace scenemotion
