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

#include "scenemotion/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"
#include "scenemotion/error.hpp"
#include "scenemotion/tensor_io.hpp"

using nlohmann::json;

namespace scenemotion {

namespace {

std::vector<std::pair<std::string, torch::Tensor>> state_of(GeneratorStack& stack) {
  std::vector<std::pair<std::string, torch::Tensor>> state;
  for (const auto& p : stack->named_parameters(true)) state.emplace_back(p.key(), p.value());
  for (const auto& b : stack->named_buffers(true)) state.emplace_back(b.key(), b.value());
  return state;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir, GeneratorStack& stack, int64_t step,
                     uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::vector<uint8_t> blob;
  json tensors = json::array();
  int64_t offset = 0;
  for (const auto& [name, t] : state_of(stack)) {
    auto data = t.detach().to(torch::kFloat32).contiguous();
    const int64_t n = data.numel();
    const size_t at = blob.size();
    blob.resize(at + 4 * n);
    const float* p = data.data_ptr<float>();
    for (int64_t i = 0; i < n; ++i) {
      uint32_t bits;
      std::memcpy(&bits, p + i, 4);
      for (int k = 0; k < 4; ++k) blob[at + 4 * i + k] = static_cast<uint8_t>(bits >> (8 * k));
    }
    tensors.push_back({{"name", name}, {"shape", t.sizes().vec()}, {"offset", offset}, {"count", n}});
    offset += n;
  }
  write_file_bytes(dir / "weights.bin", blob);
  json manifest = {{"format", "scenemotion-checkpoint"},
                   {"version", 1},
                   {"model", stack->config()},
                   {"factorized", stack->factorized()},
                   {"skeleton", "default19"},
                   {"step", step},
                   {"seed", seed},
                   {"weights", {{"path", "weights.bin"}, {"bytes", blob.size()}, {"checksum", checksum_hex(blob)}}},
                   {"tensors", tensors}};
  std::ofstream out(dir / "checkpoint.json", std::ios::trunc);
  if (!out) throw DataError(DataErrorCode::kIo, "cannot write checkpoint in " + dir.string());
  out << manifest.dump(1) << "\n";
}

namespace {

json read_manifest_json(const std::filesystem::path& dir) {
  std::ifstream in(dir / "checkpoint.json");
  if (!in) throw DataError(DataErrorCode::kIo, "no checkpoint.json in " + dir.string());
  try {
    auto j = json::parse(in);
    if (j.at("format") != "scenemotion-checkpoint" || j.at("version") != 1)
      throw DataError(DataErrorCode::kMalformed, "unsupported checkpoint format");
    return j;
  } catch (const json::exception& e) {
    throw DataError(DataErrorCode::kMalformed, std::string("checkpoint.json: ") + e.what());
  }
}

}  // namespace

CheckpointInfo read_checkpoint_info(const std::filesystem::path& dir) {
  auto j = read_manifest_json(dir);
  CheckpointInfo info;
  info.model = j.at("model").get<ModelConfig>();
  info.factorized = j.at("factorized").get<bool>();
  info.step = j.at("step").get<int64_t>();
  info.seed = j.at("seed").get<uint64_t>();
  return info;
}

GeneratorStack load_checkpoint(const std::filesystem::path& dir, CheckpointInfo* info_out) {
  auto j = read_manifest_json(dir);
  const auto info = read_checkpoint_info(dir);
  BlobRef ref{j.at("weights").at("path").get<std::string>(), j.at("weights").at("bytes").get<uint64_t>(),
              j.at("weights").at("checksum").get<std::string>()};
  const auto path = dir / ref.path;
  auto blob = read_file_bytes(path);
  if (blob.size() < ref.bytes) throw DataError(DataErrorCode::kTruncated, ref.path + ": truncated weights");
  if (blob.size() != ref.bytes)
    throw DataError(DataErrorCode::kMalformed, ref.path + ": byte length differs from manifest");
  if (checksum_hex(blob) != ref.checksum)
    throw DataError(DataErrorCode::kChecksumMismatch, ref.path + ": checksum mismatch");

  GeneratorStack stack(info.model, SkeletonGraph::default19(), info.factorized);
  std::map<std::string, torch::Tensor> state;
  for (auto& [name, t] : state_of(stack)) state[name] = t;
  torch::NoGradGuard no_grad;
  size_t loaded = 0;
  for (const auto& e : j.at("tensors")) {
    const auto name = e.at("name").get<std::string>();
    auto it = state.find(name);
    if (it == state.end()) throw DataError(DataErrorCode::kMalformed, "checkpoint: unknown tensor " + name);
    const auto shape = e.at("shape").get<std::vector<int64_t>>();
    if (it->second.sizes().vec() != shape)
      throw DataError(DataErrorCode::kMalformed, "checkpoint: shape mismatch for " + name);
    const int64_t offset = e.at("offset").get<int64_t>(), count = e.at("count").get<int64_t>();
    if (static_cast<uint64_t>(4 * (offset + count)) > blob.size())
      throw DataError(DataErrorCode::kTruncated, "checkpoint: tensor " + name + " runs past the blob");
    auto values = torch::empty({count}, torch::kFloat32);
    float* p = values.data_ptr<float>();
    for (int64_t i = 0; i < count; ++i) {
      const uint8_t* b = blob.data() + 4 * (offset + i);
      const uint32_t bits = static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
                            static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
      std::memcpy(p + i, &bits, 4);
    }
    it->second.copy_(values.reshape(shape).to(it->second.dtype()));
    ++loaded;
  }
  if (loaded != state.size())
    throw DataError(DataErrorCode::kMalformed, "checkpoint: missing tensors for this model");
  if (info_out) *info_out = info;
  return stack;
}

uint64_t tensor_hash(const std::vector<torch::Tensor>& tensors) {
  uint64_t h = 1469598103934665603ull;
  for (const auto& t : tensors) {
    auto c = t.detach().contiguous();
    const auto* p = static_cast<const uint8_t*>(c.data_ptr());
    const size_t n = c.numel() * c.element_size();
    for (size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace scenemotion
