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

#include "scenemotion/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "scenemotion/error.hpp"

using nlohmann::json;

namespace scenemotion {

namespace {

json blob_json(const BlobRef& b) {
  return {{"path", b.path}, {"bytes", b.bytes}, {"checksum", b.checksum}};
}

BlobRef blob_from(const json& j) {
  return BlobRef{j.at("path").get<std::string>(), j.at("bytes").get<uint64_t>(),
                 j.at("checksum").get<std::string>()};
}

json vec3(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

Eigen::Vector3d vec3_from(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

std::string scene_dir(int id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scenes/%04d", id);
  return buf;
}

std::filesystem::path manifest_path(const std::filesystem::path& path) {
  return std::filesystem::is_directory(path) ? path / "manifest.json" : path;
}

}  // namespace

void to_json(json& j, const DatasetManifest& m) {
  j = json{{"format_version", m.format_version}, {"seed", m.seed}, {"frames", m.frames}};
  json scenes = json::array();
  for (const auto& s : m.scenes) {
    json boxes = json::array();
    for (const auto& b : s.room.obstacles) boxes.push_back({{"lo", vec3(b.lo)}, {"hi", vec3(b.hi)}});
    json rot = json::array();
    for (int r = 0; r < 3; ++r)
      rot.push_back({s.pose.world_from_camera(r, 0), s.pose.world_from_camera(r, 1),
                     s.pose.world_from_camera(r, 2)});
    scenes.push_back({{"id", s.id},
                      {"seed", s.seed},
                      {"image", blob_json(s.image)},
                      {"depth", blob_json(s.depth)},
                      {"cloud", blob_json(s.cloud)},
                      {"intrinsics",
                       {{"fx", s.intrinsics.fx},
                        {"fy", s.intrinsics.fy},
                        {"cx", s.intrinsics.cx},
                        {"cy", s.intrinsics.cy},
                        {"width", s.intrinsics.width},
                        {"height", s.intrinsics.height}}},
                      {"room",
                       {{"x0", s.room.x0},
                        {"x1", s.room.x1},
                        {"z0", s.room.z0},
                        {"z1", s.room.z1},
                        {"height", s.room.height},
                        {"obstacles", boxes}}},
                      {"camera", {{"position", vec3(s.pose.position)}, {"world_from_camera", rot}}}});
  }
  json motions = json::array();
  for (const auto& mo : m.motions) {
    motions.push_back({{"id", mo.id},
                       {"scene", mo.scene},
                       {"seed", mo.seed},
                       {"frames", mo.frames},
                       {"skeleton", mo.skeleton},
                       {"motion", blob_json(mo.motion)}});
  }
  j["scenes"] = scenes;
  j["motions"] = motions;
}

void from_json(const json& j, DatasetManifest& m) {
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != 1)
    throw DataError(DataErrorCode::kMalformed,
                    "manifest: unsupported format version " + std::to_string(m.format_version));
  m.seed = j.at("seed").get<uint64_t>();
  m.frames = j.at("frames").get<int>();
  m.scenes.clear();
  for (const auto& s : j.at("scenes")) {
    SceneEntry e;
    e.id = s.at("id").get<int>();
    e.seed = s.at("seed").get<uint64_t>();
    e.image = blob_from(s.at("image"));
    e.depth = blob_from(s.at("depth"));
    e.cloud = blob_from(s.at("cloud"));
    const auto& k = s.at("intrinsics");
    e.intrinsics = CameraIntrinsics{k.at("fx").get<double>(), k.at("fy").get<double>(),
                                    k.at("cx").get<double>(), k.at("cy").get<double>(),
                                    k.at("width").get<int>(),  k.at("height").get<int>()};
    const auto& r = s.at("room");
    e.room.x0 = r.at("x0").get<double>();
    e.room.x1 = r.at("x1").get<double>();
    e.room.z0 = r.at("z0").get<double>();
    e.room.z1 = r.at("z1").get<double>();
    e.room.height = r.at("height").get<double>();
    for (const auto& b : r.at("obstacles"))
      e.room.obstacles.push_back(Box{vec3_from(b.at("lo")), vec3_from(b.at("hi"))});
    const auto& c = s.at("camera");
    e.pose.position = vec3_from(c.at("position"));
    for (int row = 0; row < 3; ++row)
      for (int col = 0; col < 3; ++col)
        e.pose.world_from_camera(row, col) = c.at("world_from_camera").at(row).at(col).get<double>();
    m.scenes.push_back(std::move(e));
  }
  m.motions.clear();
  for (const auto& mo : j.at("motions")) {
    MotionEntry e;
    e.id = mo.at("id").get<int>();
    e.scene = mo.at("scene").get<int>();
    e.seed = mo.at("seed").get<uint64_t>();
    e.frames = mo.at("frames").get<int>();
    e.skeleton = mo.at("skeleton").get<std::string>();
    e.motion = blob_from(mo.at("motion"));
    m.motions.push_back(std::move(e));
  }
}

DatasetManifest write_dataset(const std::filesystem::path& dir, const Dataset& data) {
  std::filesystem::create_directories(dir);
  DatasetManifest m;
  m.seed = data.seed;
  m.frames = data.frames;
  for (size_t i = 0; i < data.scenes.size(); ++i) {
    const auto& s = data.scenes[i];
    SceneEntry e;
    e.id = static_cast<int>(i);
    e.seed = data.seed + i;
    const std::string d = scene_dir(e.id);
    e.image = write_blob(dir, d + "/image.smlb", s.image);
    e.depth = write_blob(dir, d + "/depth.smlb", s.depth.values);
    e.cloud = write_blob(dir, d + "/cloud.smlb", s.cloud.as_tensor());
    e.intrinsics = s.intrinsics;
    e.room = s.room;
    e.pose = s.pose;
    m.scenes.push_back(std::move(e));
  }
  for (size_t i = 0; i < data.motions.size(); ++i) {
    const auto& mo = data.motions[i];
    if (mo.scene < 0 || mo.scene >= static_cast<int>(data.scenes.size()))
      throw ValidationError("write_dataset: motion refers to a missing scene");
    MotionEntry e;
    e.id = static_cast<int>(i);
    e.scene = mo.scene;
    e.seed = mo.seed;
    e.frames = static_cast<int>(mo.joints.size(-1));
    e.skeleton = data.skeleton;
    char buf[40];
    std::snprintf(buf, sizeof buf, "motions/%05d.smlb", e.id);
    e.motion = write_blob(dir, buf, mo.joints);
    m.motions.push_back(std::move(e));
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError(DataErrorCode::kIo, "cannot write manifest in " + dir.string());
  out << json(m).dump(2) << "\n";
  return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  const auto file = manifest_path(path);
  std::ifstream in(file);
  if (!in) throw DataError(DataErrorCode::kIo, "cannot open manifest " + file.string());
  DatasetManifest m;
  try {
    m = json::parse(in).get<DatasetManifest>();
  } catch (const json::exception& e) {
    throw DataError(DataErrorCode::kMalformed, "manifest " + file.string() + ": " + e.what());
  }
  const auto root = file.parent_path();
  auto verify = [&](const BlobRef& ref) {
    const auto p = root / ref.path;
    if (!std::filesystem::exists(p))
      throw DataError(DataErrorCode::kIo, ref.path + ": referenced blob is missing");
    auto bytes = read_file_bytes(p);
    if (bytes.size() < ref.bytes)
      throw DataError(DataErrorCode::kTruncated, ref.path + ": blob is truncated");
    if (bytes.size() != ref.bytes)
      throw DataError(DataErrorCode::kMalformed, ref.path + ": byte length differs from manifest");
    if (checksum_hex(bytes) != ref.checksum)
      throw DataError(DataErrorCode::kChecksumMismatch, ref.path + ": checksum mismatch");
  };
  for (const auto& s : m.scenes) {
    verify(s.image);
    verify(s.depth);
    verify(s.cloud);
  }
  for (const auto& mo : m.motions) {
    if (mo.scene < 0 || mo.scene >= static_cast<int>(m.scenes.size()))
      throw DataError(DataErrorCode::kMalformed, "manifest: motion refers to a missing scene");
    verify(mo.motion);
  }
  return m;
}

Dataset read_dataset(const std::filesystem::path& path) {
  const auto file = manifest_path(path);
  const auto m = read_manifest(file);
  const auto root = file.parent_path();
  Dataset data;
  data.seed = m.seed;
  data.frames = m.frames;
  for (const auto& e : m.scenes) {
    SyntheticScene s;
    s.room = e.room;
    s.pose = e.pose;
    s.intrinsics = e.intrinsics;
    s.image = read_blob(root, e.image);
    auto depth = read_blob(root, e.depth).to(torch::kFloat64);
    s.depth = DepthMap{depth, depth > 0};
    s.cloud = PointCloud::from_tensor(read_blob(root, e.cloud));
    data.scenes.push_back(std::move(s));
  }
  for (const auto& e : m.motions) {
    if (!m.motions.empty()) data.skeleton = e.skeleton;
    data.motions.push_back(MotionRecord{e.scene, e.seed, read_blob(root, e.motion)});
  }
  return data;
}

uint64_t walk_seed(uint64_t seed, int scene, int walk) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(scene), static_cast<uint32_t>(walk)};
  uint32_t out[2];
  seq.generate(out, out + 2);
  return static_cast<uint64_t>(out[0]) << 32 | out[1];
}

Dataset generate_dataset(uint64_t seed, int scenes, int walks_per_scene,
                         const SceneConfig& scene_cfg, const WalkConfig& walk_cfg, int threads) {
  if (scenes < 0 || walks_per_scene < 0)
    throw ConfigError("generate_dataset: counts must be non-negative");
  scene_cfg.validate();
  const auto graph = SkeletonGraph::default19();
  Dataset data;
  data.seed = seed;
  data.frames = walk_cfg.frames;
  data.scenes.resize(scenes);
  std::vector<std::vector<torch::Tensor>> walks(scenes);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < scenes; i = next++) {
      try {
        data.scenes[i] = generate_scene(seed + static_cast<uint64_t>(i), scene_cfg);
        PointGrid grid(data.scenes[i].cloud, 0.1);
        for (int w = 0; w < walks_per_scene; ++w)
          walks[i].push_back(generate_walk(data.scenes[i], grid, graph, walk_seed(seed, i, w), walk_cfg));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, std::max(1, scenes));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (int i = 0; i < scenes; ++i) {
    for (int w = 0; w < walks_per_scene; ++w)
      data.motions.push_back(MotionRecord{i, walk_seed(seed, i, w), walks[i][w]});
  }
  return data;
}

}  // namespace scenemotion
