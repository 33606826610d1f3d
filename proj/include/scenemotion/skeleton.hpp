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

#include <string>
#include <utility>
#include <vector>

namespace scenemotion {

using Bone = std::pair<int, int>;

/// Joint tree plus the coarsening hierarchy used by graph up/downsampling.
///
/// `levels` lists node counts from coarsest to finest (default 1, 5, 11, 19);
/// `assignment[k][j]` is the node at level k that fine joint j belongs to.
/// Coarser levels must nest: two joints sharing a node at level k+1 share a
/// node at level k.
class SkeletonGraph {
 public:
  SkeletonGraph(int joint_count, int root_index, std::vector<Bone> bones,
                std::vector<int> levels,
                std::vector<std::vector<int>> assignment,
                std::vector<std::string> joint_names = {});

  /// The 19 key-joint body with the limbs -> 5 super-nodes -> 1 ladder.
  static SkeletonGraph default19();

  int joint_count() const { return joint_count_; }
  int root_index() const { return root_index_; }
  const std::vector<Bone>& bones() const { return bones_; }
  const std::vector<int>& levels() const { return levels_; }
  int level_count() const { return static_cast<int>(levels_.size()); }
  const std::vector<int>& assignment(int level) const { return assignment_.at(level); }
  const std::vector<std::string>& joint_names() const { return joint_names_; }

  /// Level index whose node count equals `nodes`; throws if absent.
  int level_of(int nodes) const;

  /// parent[n] for each node n at level `fine` gives its node at level `coarse`.
  std::vector<int> node_parent(int fine, int coarse) const;

  /// Undirected edges between distinct nodes at `level` induced by the bones.
  std::vector<Bone> level_edges(int level) const;

  /// Copy with one extra pseudo-node attached to the root. At every coarser
  /// level it joins the root's node. Used by the joint (non-factorized)
  /// generator, whose extra node carries the root velocity.
  SkeletonGraph with_pseudo_node() const;

 private:
  void validate() const;

  int joint_count_;
  int root_index_;
  std::vector<Bone> bones_;
  std::vector<int> levels_;
  std::vector<std::vector<int>> assignment_;
  std::vector<std::string> joint_names_;
};

/// True when `bones` form a spanning tree over `joint_count` joints.
bool is_spanning_tree(int joint_count, const std::vector<Bone>& bones);

}  // namespace scenemotion
