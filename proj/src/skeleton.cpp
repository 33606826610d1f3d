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

#include "scenemotion/skeleton.hpp"

#include <numeric>
#include <set>

#include "scenemotion/error.hpp"

namespace scenemotion {

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

bool is_spanning_tree(int joint_count, const std::vector<Bone>& bones) {
  if (joint_count <= 0) return false;
  if (static_cast<int>(bones.size()) != joint_count - 1) return false;
  std::vector<int> parent(joint_count);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& [a, b] : bones) {
    if (a < 0 || b < 0 || a >= joint_count || b >= joint_count || a == b) return false;
    const int ra = find_root(parent, a);
    const int rb = find_root(parent, b);
    if (ra == rb) return false;  // cycle
    parent[ra] = rb;
  }
  // J-1 edges without a cycle span all joints.
  return true;
}

SkeletonGraph::SkeletonGraph(int joint_count, int root_index, std::vector<Bone> bones,
                             std::vector<int> levels,
                             std::vector<std::vector<int>> assignment,
                             std::vector<std::string> joint_names)
    : joint_count_(joint_count),
      root_index_(root_index),
      bones_(std::move(bones)),
      levels_(std::move(levels)),
      assignment_(std::move(assignment)),
      joint_names_(std::move(joint_names)) {
  validate();
}

void SkeletonGraph::validate() const {
  if (joint_count_ <= 0) throw ValidationError("skeleton: joint count must be positive");
  if (root_index_ < 0 || root_index_ >= joint_count_)
    throw ValidationError("skeleton: root index out of range");
  if (!is_spanning_tree(joint_count_, bones_))
    throw ValidationError("skeleton: bones must form a connected tree without cycles");
  if (levels_.empty() || levels_.back() != joint_count_)
    throw ValidationError("skeleton: coarsening levels must end at the joint count");
  for (size_t k = 1; k < levels_.size(); ++k) {
    if (levels_[k] <= levels_[k - 1])
      throw ValidationError("skeleton: coarsening levels must be strictly increasing");
  }
  if (assignment_.size() != levels_.size())
    throw ValidationError("skeleton: one assignment per coarsening level required");
  for (size_t k = 0; k < levels_.size(); ++k) {
    const auto& a = assignment_[k];
    if (static_cast<int>(a.size()) != joint_count_)
      throw ValidationError("skeleton: assignment must cover every joint");
    std::vector<int> hits(levels_[k], 0);
    for (int node : a) {
      if (node < 0 || node >= levels_[k])
        throw ValidationError("skeleton: assignment references a missing node");
      ++hits[node];
    }
    for (int h : hits) {
      if (h == 0) throw ValidationError("skeleton: empty coarse node");
    }
  }
  for (int j = 0; j < joint_count_; ++j) {
    if (assignment_.back()[j] != j)
      throw ValidationError("skeleton: finest level must be the identity assignment");
  }
  // Nesting: the level-k node of a joint is a function of its level-(k+1) node.
  for (size_t k = 0; k + 1 < levels_.size(); ++k) {
    std::vector<int> parent(levels_[k + 1], -1);
    for (int j = 0; j < joint_count_; ++j) {
      int& p = parent[assignment_[k + 1][j]];
      if (p == -1) {
        p = assignment_[k][j];
      } else if (p != assignment_[k][j]) {
        throw ValidationError("skeleton: coarsening levels do not nest");
      }
    }
  }
}

SkeletonGraph SkeletonGraph::default19() {
  std::vector<std::string> names = {
      "pelvis",  "spine",   "chest",   "neck",    "head",   "l_shoulder", "l_elbow",
      "l_wrist", "r_shoulder", "r_elbow", "r_wrist", "l_hip", "l_knee",   "l_ankle",
      "l_toe",   "r_hip",   "r_knee",  "r_ankle", "r_toe"};
  std::vector<Bone> bones = {{0, 1},   {1, 2},   {2, 3},   {3, 4},   {2, 5},   {5, 6},
                             {6, 7},   {2, 8},   {8, 9},   {9, 10},  {0, 11},  {11, 12},
                             {12, 13}, {13, 14}, {0, 15},  {15, 16}, {16, 17}, {17, 18}};
  std::vector<int> level1(19, 0);
  // trunk, left arm, right arm, left leg, right leg
  std::vector<int> level5 = {0, 0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4};
  // torso, upper trunk, head, then upper/lower segments of each limb
  std::vector<int> level11 = {0, 0, 1, 1, 2, 3, 3, 4, 5, 5, 6, 7, 7, 8, 8, 9, 9, 10, 10};
  std::vector<int> level19(19);
  std::iota(level19.begin(), level19.end(), 0);
  return SkeletonGraph(19, 0, std::move(bones), {1, 5, 11, 19},
                       {level1, level5, level11, level19}, std::move(names));
}

int SkeletonGraph::level_of(int nodes) const {
  for (int k = 0; k < level_count(); ++k) {
    if (levels_[k] == nodes) return k;
  }
  throw ValidationError("skeleton: no coarsening level with " + std::to_string(nodes) + " nodes");
}

std::vector<int> SkeletonGraph::node_parent(int fine, int coarse) const {
  if (fine < coarse) throw ValidationError("skeleton: node_parent expects fine >= coarse");
  std::vector<int> parent(levels_.at(fine), -1);
  for (int j = 0; j < joint_count_; ++j) parent[assignment_[fine][j]] = assignment_[coarse][j];
  return parent;
}

std::vector<Bone> SkeletonGraph::level_edges(int level) const {
  std::set<Bone> edges;
  const auto& a = assignment_.at(level);
  for (const auto& [i, j] : bones_) {
    int u = a[i], v = a[j];
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    edges.insert({u, v});
  }
  return {edges.begin(), edges.end()};
}

SkeletonGraph SkeletonGraph::with_pseudo_node() const {
  const int extra = joint_count_;
  auto bones = bones_;
  bones.emplace_back(root_index_, extra);
  auto levels = levels_;
  levels.back() = joint_count_ + 1;
  auto assignment = assignment_;
  for (size_t k = 0; k + 1 < assignment.size(); ++k) assignment[k].push_back(assignment[k][root_index_]);
  assignment.back().push_back(extra);
  auto names = joint_names_;
  if (!names.empty()) names.push_back("root_motion");
  return SkeletonGraph(joint_count_ + 1, root_index_, std::move(bones), std::move(levels),
                       std::move(assignment), std::move(names));
}

}  // namespace scenemotion
