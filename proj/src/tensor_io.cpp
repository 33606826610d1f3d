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

#include "scenemotion/tensor_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "scenemotion/error.hpp"

namespace scenemotion {

namespace {

constexpr char kMagic[8] = {'S', 'M', 'L', 'B', '0', '0', '0', '1'};

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t get_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

}  // namespace

std::vector<uint8_t> encode_tensor(const torch::Tensor& t) {
  auto data = t.detach().to(torch::kCPU, torch::kFloat32).contiguous();
  std::vector<uint8_t> out(kMagic, kMagic + 8);
  put_u32(out, static_cast<uint32_t>(data.dim()));
  for (int64_t d : data.sizes()) put_u32(out, static_cast<uint32_t>(d));
  const float* p = data.data_ptr<float>();
  const int64_t n = data.numel();
  out.reserve(out.size() + 4 * n);
  for (int64_t i = 0; i < n; ++i) {
    uint32_t bits;
    std::memcpy(&bits, p + i, 4);
    put_u32(out, bits);
  }
  return out;
}

torch::Tensor decode_tensor(const std::vector<uint8_t>& bytes, const std::string& name) {
  if (bytes.size() < 8)
    throw DataError(DataErrorCode::kTruncated, name + ": truncated before the magic");
  if (std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw DataError(DataErrorCode::kMagicMismatch, name + ": magic is not SMLB0001");
  if (bytes.size() < 12) throw DataError(DataErrorCode::kTruncated, name + ": truncated header");
  const uint32_t rank = get_u32(bytes.data() + 8);
  if (bytes.size() < 12 + 4ull * rank)
    throw DataError(DataErrorCode::kTruncated, name + ": truncated dimension list");
  std::vector<int64_t> dims(rank);
  uint64_t count = 1;
  for (uint32_t i = 0; i < rank; ++i) {
    dims[i] = get_u32(bytes.data() + 12 + 4 * i);
    count *= static_cast<uint64_t>(dims[i]);
  }
  const size_t offset = 12 + 4ull * rank;
  if (bytes.size() < offset + 4 * count)
    throw DataError(DataErrorCode::kTruncated, name + ": payload shorter than its shape");
  if (bytes.size() > offset + 4 * count)
    throw DataError(DataErrorCode::kMalformed, name + ": trailing bytes after payload");
  auto t = torch::empty(dims, torch::kFloat32);
  float* p = t.data_ptr<float>();
  for (uint64_t i = 0; i < count; ++i) {
    const uint32_t bits = get_u32(bytes.data() + offset + 4 * i);
    std::memcpy(p + i, &bits, 4);
  }
  return t;
}

std::string checksum_hex(const std::vector<uint8_t>& bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  size_t done = 0;
  while (done < bytes.size()) {
    const uInt chunk = static_cast<uInt>(std::min<size_t>(bytes.size() - done, 1u << 30));
    crc = crc32(crc, bytes.data() + done, chunk);
    done += chunk;
  }
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorCode::kIo, "cannot open " + path.string());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<uint8_t>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(DataErrorCode::kIo, "short write to " + path.string());
}

BlobRef write_blob(const std::filesystem::path& root, const std::string& relative,
                   const torch::Tensor& t) {
  auto bytes = encode_tensor(t);
  write_file_bytes(root / relative, bytes);
  return BlobRef{relative, bytes.size(), checksum_hex(bytes)};
}

torch::Tensor read_blob(const std::filesystem::path& root, const BlobRef& ref) {
  const auto path = root / ref.path;
  if (!std::filesystem::exists(path))
    throw DataError(DataErrorCode::kIo, ref.path + ": referenced blob is missing");
  auto bytes = read_file_bytes(path);
  if (bytes.size() < ref.bytes)
    throw DataError(DataErrorCode::kTruncated,
                    ref.path + ": " + std::to_string(bytes.size()) + " bytes, manifest records " +
                        std::to_string(ref.bytes));
  if (bytes.size() != ref.bytes)
    throw DataError(DataErrorCode::kMalformed, ref.path + ": byte length differs from manifest");
  if (checksum_hex(bytes) != ref.checksum)
    throw DataError(DataErrorCode::kChecksumMismatch, ref.path + ": checksum mismatch");
  return decode_tensor(bytes, ref.path);
}

}  // namespace scenemotion
