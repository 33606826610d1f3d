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

#include <cstring>
#include <fstream>

#include "doctest_torch.hpp"
#include "fixtures.hpp"
#include "helpers.hpp"
#include "scenemotion/checkpoint.hpp"
#include "scenemotion/dataset.hpp"
#include "scenemotion/error.hpp"
#include "scenemotion/tensor_io.hpp"

using namespace scenemotion;

namespace {

DataErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.code();
  }
  FAIL("expected a DataError");
  return DataErrorCode::kIo;
}

uint32_t read_u32(const std::vector<uint8_t>& b, size_t at) {
  return b[at] | (b[at + 1] << 8) | (b[at + 2] << 16) | (static_cast<uint32_t>(b[at + 3]) << 24);
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("tensor container layout and bit-identical round trip") {
    auto gen = make_generator(4);
    auto t = torch::randn({3, 19, 64}, gen, torch::kFloat32);
    auto bytes = encode_tensor(t);
    REQUIRE(bytes.size() == 8 + 4 + 3 * 4 + 3 * 19 * 64 * 4);
    CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "SMLB0001");
    CHECK(read_u32(bytes, 8) == 3);
    CHECK(read_u32(bytes, 12) == 3);
    CHECK(read_u32(bytes, 16) == 19);
    CHECK(read_u32(bytes, 20) == 64);
    float first;
    uint32_t bits = read_u32(bytes, 24);
    std::memcpy(&first, &bits, 4);
    CHECK(first == t[0][0][0].item<float>());
    auto back = decode_tensor(bytes);
    CHECK(back.dtype() == torch::kFloat32);
    CHECK(testing::bit_equal(back, t));
    // Doubles are stored as float32.
    auto d = torch::randn({5}, gen, torch::kFloat64);
    CHECK(torch::equal(decode_tensor(encode_tensor(d)), d.to(torch::kFloat32)));
  }

  TEST_CASE("each corruption has its own error code") {
    auto bytes = encode_tensor(torch::ones({2, 3}));
    auto bad_magic = bytes;
    bad_magic[3] = 'X';
    CHECK(code_of([&] { decode_tensor(bad_magic); }) == DataErrorCode::kMagicMismatch);
    auto shorter = bytes;
    shorter.resize(bytes.size() - 2);
    CHECK(code_of([&] { decode_tensor(shorter); }) == DataErrorCode::kTruncated);
    CHECK(code_of([&] { decode_tensor(std::vector<uint8_t>(5, 'S')); }) == DataErrorCode::kTruncated);
    auto longer = bytes;
    longer.push_back(0);
    CHECK(code_of([&] { decode_tensor(longer); }) == DataErrorCode::kMalformed);
  }

  TEST_CASE("checksum is zlib crc32") {
    const std::string s = "123456789";
    CHECK(checksum_hex(std::vector<uint8_t>(s.begin(), s.end())) == "cbf43926");
  }

  TEST_CASE("blob checksum failure names the blob") {
    testing::TempDir dir("blob");
    auto ref = write_blob(dir.path(), "a/b.smlb", torch::arange(10, torch::kFloat32));
    CHECK(torch::equal(read_blob(dir.path(), ref), torch::arange(10, torch::kFloat32)));
    auto raw = read_file_bytes(dir / "a/b.smlb");
    raw.back() ^= 0x01;
    write_file_bytes(dir / "a/b.smlb", raw);
    try {
      read_blob(dir.path(), ref);
      FAIL("corruption not detected");
    } catch (const DataError& e) {
      CHECK(e.code() == DataErrorCode::kChecksumMismatch);
      CHECK(std::string(e.what()).find("a/b.smlb") != std::string::npos);
    }
    std::filesystem::remove(dir / "a/b.smlb");
    CHECK(code_of([&] { read_blob(dir.path(), ref); }) == DataErrorCode::kIo);
  }

  TEST_CASE("dataset round trip") {
    const auto& data = testing::tiny_dataset();
    testing::TempDir dir("dataset");
    auto manifest = write_dataset(dir.path(), data);
    CHECK(manifest.scenes.size() == data.scenes.size());
    CHECK(manifest.motions.size() == data.motions.size());
    auto back = read_dataset(dir.path());
    CHECK(back.seed == data.seed);
    CHECK(back.frames == data.frames);
    REQUIRE(back.motions.size() == data.motions.size());
    for (size_t i = 0; i < data.motions.size(); ++i) {
      CHECK(back.motions[i].scene == data.motions[i].scene);
      CHECK(back.motions[i].seed == data.motions[i].seed);
      CHECK(torch::equal(back.motions[i].joints.to(torch::kFloat32), data.motions[i].joints.to(torch::kFloat32)));
    }
    for (size_t s = 0; s < data.scenes.size(); ++s) {
      CHECK(torch::equal(back.scenes[s].image, data.scenes[s].image));
      CHECK(back.scenes[s].cloud.size() == data.scenes[s].cloud.size());
      CHECK(back.scenes[s].intrinsics.fx == data.scenes[s].intrinsics.fx);
      CHECK(back.scenes[s].room.obstacles.size() == data.scenes[s].room.obstacles.size());
      CHECK((back.scenes[s].pose.position - data.scenes[s].pose.position).norm() == 0.0);
    }
    CHECK(read_manifest(dir / "manifest.json").motions.size() == data.motions.size());

    // Corrupt one motion blob.
    const auto path = dir / manifest.motions[1].motion.path;
    auto raw = read_file_bytes(path);
    raw[raw.size() / 2] ^= 0x40;
    write_file_bytes(path, raw);
    try {
      read_dataset(dir.path());
      FAIL("corruption not detected");
    } catch (const DataError& e) {
      CHECK(e.code() == DataErrorCode::kChecksumMismatch);
      CHECK(std::string(e.what()).find(manifest.motions[1].motion.path) != std::string::npos);
    }
    raw.resize(raw.size() - 4);
    write_file_bytes(path, raw);
    CHECK(code_of([&] { read_dataset(dir.path()); }) == DataErrorCode::kTruncated);

    std::ofstream(dir / "manifest.json", std::ios::trunc) << "{ not json";
    CHECK(code_of([&] { read_dataset(dir.path()); }) == DataErrorCode::kMalformed);
  }

  TEST_CASE("empty dataset has a valid manifest") {
    testing::TempDir dir("empty");
    auto empty = generate_dataset(9, 0, 0, testing::quick_scene_config(), WalkConfig{}, 1);
    CHECK(empty.motions.empty());
    write_dataset(dir.path(), empty);
    auto m = read_manifest(dir.path());
    CHECK(m.scenes.empty());
    CHECK(m.motions.empty());
    CHECK(m.format_version == 1);
    CHECK(read_dataset(dir.path()).motions.empty());
  }

  TEST_CASE("generation does not depend on the thread count") {
    auto a = generate_dataset(21, 3, 2, testing::quick_scene_config(), WalkConfig{}, 1);
    auto b = generate_dataset(21, 3, 2, testing::quick_scene_config(), WalkConfig{}, 2);
    REQUIRE(a.motions.size() == b.motions.size());
    for (size_t i = 0; i < a.motions.size(); ++i) CHECK(torch::equal(a.motions[i].joints, b.motions[i].joints));
    for (size_t s = 0; s < a.scenes.size(); ++s) CHECK(torch::equal(a.scenes[s].depth.values, b.scenes[s].depth.values));
    CHECK(walk_seed(21, 0, 1) != walk_seed(21, 1, 0));
    CHECK_THROWS_AS(generate_dataset(1, -1, 1, SceneConfig{}, WalkConfig{}, 1), ConfigError);
  }

  TEST_CASE("checkpoint round trip reproduces outputs") {
    const auto graph = SkeletonGraph::default19();
    torch::manual_seed(3);
    GeneratorStack stack(ModelConfig::desk(), graph);
    testing::TempDir dir("ckpt");
    save_checkpoint(dir.path(), stack, 42, 7);
    CheckpointInfo info;
    auto loaded = load_checkpoint(dir.path(), &info);
    CHECK(info.step == 42);
    CHECK(info.seed == 7);
    CHECK(info.factorized);
    CHECK(tensor_hash(loaded->parameters()) == tensor_hash(stack->parameters()));

    const auto& data = testing::tiny_dataset();
    auto image = data.scenes[0].image.unsqueeze(0);
    auto p0 = data.motions[0].joints.to(torch::kFloat32).select(2, 0).unsqueeze(0);
    stack->eval();
    loaded->eval();
    torch::NoGradGuard ng;
    auto g1 = make_generator(5), g2 = make_generator(5);
    CHECK(testing::bit_equal(stack->forward(image, p0, g1).joints, loaded->forward(image, p0, g2).joints));

    auto raw = read_file_bytes(dir / "weights.bin");
    raw[100] ^= 0x10;
    write_file_bytes(dir / "weights.bin", raw);
    try {
      load_checkpoint(dir.path());
      FAIL("corruption not detected");
    } catch (const DataError& e) {
      CHECK(e.code() == DataErrorCode::kChecksumMismatch);
      CHECK(std::string(e.what()).find("weights.bin") != std::string::npos);
    }
    CHECK(code_of([&] { load_checkpoint(dir / "missing"); }) == DataErrorCode::kIo);
  }
}
