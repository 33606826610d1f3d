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

#include "scenemotion/core_motion.hpp"

#include <string>

#include "scenemotion/error.hpp"

namespace scenemotion {

namespace {

void require_xyz_last(const torch::Tensor& t, const char* what) {
  if (t.dim() < 2 || t.size(-1) != 3)
    throw ValidationError(std::string(what) + ": expected (..., T, 3) layout");
}

}  // namespace

Trajectory integrate_velocities(const torch::Tensor& velocities) {
  require_xyz_last(velocities, "integrate_velocities");
  const int64_t frames = velocities.size(-2);
  if (frames < 1) throw ValidationError("integrate_velocities: need at least one frame");
  if (!torch::isfinite(velocities).all().item<bool>())
    throw ValidationError("integrate_velocities: non-finite velocity");

  auto origin = torch::zeros_like(velocities.narrow(-2, 0, 1));
  torch::Tensor positions;
  if (frames == 1) {
    positions = origin;
  } else {
    positions = torch::cat({origin, velocities.narrow(-2, 0, frames - 1).cumsum(-2)}, -2);
  }
  return {velocities, positions};
}

torch::Tensor differentiate_trajectory(const torch::Tensor& positions) {
  require_xyz_last(positions, "differentiate_trajectory");
  const int64_t frames = positions.size(-2);
  if (frames < 2) throw ValidationError("differentiate_trajectory: need at least two frames");
  auto start = positions.narrow(-2, 0, 1);
  if (start.abs().max().item<double>() > 1e-9)
    throw ValidationError("differentiate_trajectory: trajectory must start at the origin");
  return positions.narrow(-2, 1, frames - 1) - positions.narrow(-2, 0, frames - 1);
}

Motion compose_motion(const PoseSequence& pose, const Trajectory& trajectory) {
  const auto& p = pose.poses;
  const auto& r = trajectory.positions;
  if (p.dim() < 3 || p.size(-3) != 3)
    throw ValidationError("compose_motion: poses must be (..., 3, J, T)");
  require_xyz_last(r, "compose_motion");
  if (p.size(-1) != r.size(-2))
    throw ValidationError("compose_motion: pose length " + std::to_string(p.size(-1)) +
                          " != trajectory length " + std::to_string(r.size(-2)));
  // (..., T, 3) -> (..., 3, 1, T)
  auto offset = r.transpose(-1, -2).unsqueeze(-2);
  return {p + offset, trajectory, pose};
}

torch::Tensor root_track(const torch::Tensor& joints, int root_index) {
  return joints.select(-2, root_index).transpose(-1, -2);
}

std::pair<PoseSequence, torch::Tensor> center_subtract(const torch::Tensor& raw,
                                                       const SkeletonGraph& graph) {
  if (raw.dim() < 3 || raw.size(-3) != 3)
    throw ValidationError("center_subtract: expected (..., 3, J, T)");
  if (raw.size(-2) != graph.joint_count())
    throw ValidationError("center_subtract: joint count " + std::to_string(raw.size(-2)) +
                          " does not match skeleton (" + std::to_string(graph.joint_count()) +
                          ")");
  const int root = graph.root_index();
  auto root_joint = raw.narrow(-2, root, 1);
  // x - x is exactly zero, so the root row of the result is exactly zero too.
  auto poses = raw - root_joint;
  return {PoseSequence{poses}, root_track(raw, root)};
}

torch::Tensor translate(const torch::Tensor& joints, const torch::Tensor& offset) {
  return joints + offset.unsqueeze(-1).unsqueeze(-1);
}

}  // namespace scenemotion
