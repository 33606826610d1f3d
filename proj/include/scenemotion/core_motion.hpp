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

#include <utility>

#include "scenemotion/skeleton.hpp"

namespace scenemotion {

// Tensor layouts (leading batch dimensions are allowed everywhere):
//   velocities, positions   (..., T, 3)
//   poses, motions          (..., 3, J, T)
// All coordinates are metres in the camera frame.

/// Root path as per-frame velocities and the positions they integrate to.
/// positions[0] is the origin; positions[t] = sum of velocities[0..t-1].
/// The last velocity only extrapolates to a frame that is not stored.
struct Trajectory {
  torch::Tensor velocities;
  torch::Tensor positions;

  int64_t length() const { return positions.size(-2); }
};

/// Root-relative skeletons: the root joint is zero on every frame.
struct PoseSequence {
  torch::Tensor poses;

  int64_t length() const { return poses.size(-1); }
  int64_t joints() const { return poses.size(-2); }
};

/// Composed motion X = P + R, plus the parts it came from.
struct Motion {
  torch::Tensor joints;
  Trajectory trajectory;
  PoseSequence pose;

  int64_t length() const { return joints.size(-1); }
};

Trajectory integrate_velocities(const torch::Tensor& velocities);

/// Forward differences R[i+1] - R[i]; returns T-1 velocities.
torch::Tensor differentiate_trajectory(const torch::Tensor& positions);

Motion compose_motion(const PoseSequence& pose, const Trajectory& trajectory);

/// Splits a raw sequence into root-relative poses and the root track.
std::pair<PoseSequence, torch::Tensor> center_subtract(const torch::Tensor& raw,
                                                       const SkeletonGraph& graph);

/// Root track (..., T, 3) of a (..., 3, J, T) sequence.
torch::Tensor root_track(const torch::Tensor& joints, int root_index);

/// Translate a (..., 3, J, T) sequence by a per-sequence offset (..., 3).
torch::Tensor translate(const torch::Tensor& joints, const torch::Tensor& offset);

}  // namespace scenemotion
