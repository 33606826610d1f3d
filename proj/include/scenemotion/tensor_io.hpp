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

namespace scenemotion {

/// "SMLB0001" container: 8-byte magic, u32 LE rank, rank u32 LE dims, then
/// little-endian float32 values in row-major order.
std::vector<uint8_t> encode_tensor(const torch::Tensor& t);
/// `name` appears in error messages.
torch::Tensor decode_tensor(const std::vector<uint8_t>& bytes, const std::string& name = "blob");

/// CRC-32 (zlib polynomial) as 8 lowercase hex digits.
std::string checksum_hex(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<uint8_t>& bytes);

/// Reference to a blob on disk, relative to the dataset root.
struct BlobRef {
  std::string path;
  uint64_t bytes = 0;
  std::string checksum;
};

BlobRef write_blob(const std::filesystem::path& root, const std::string& relative,
                   const torch::Tensor& t);
/// Verifies length and checksum before decoding.
torch::Tensor read_blob(const std::filesystem::path& root, const BlobRef& ref);

}  // namespace scenemotion
