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

#include <cstdint>
#include <vector>

#include "json.hpp"

namespace scenemotion {

struct EncoderConfig {
  int image_height = 128;
  int image_width = 256;
  /// Widths of the stem and the three strided residual stages.
  std::vector<int> widths = {16, 32, 64, 64};
  /// Length of the pooled scene feature.
  int feature_channels = 64;
};

/// Trajectory / pose generator shapes. The first stage is an unpadded
/// temporal convolution (t0 -> t0 - 2); each of the `doublings` later stages
/// doubles the length, so output_length() = 2^doublings * (t0 - 2).
struct GeneratorConfig {
  int t0 = 6;
  int doublings = 2;
  double alpha = 0.04;
  int trajectory_noise = 64;
  int pose_noise = 256;
  /// doublings + 1 widths each.
  std::vector<int> trajectory_widths = {128, 64, 32};
  std::vector<int> pose_widths = {128, 64, 32};
  bool full_scale = false;

  int output_length() const;
  void validate() const;
};

struct CriticConfig {
  /// Five stage widths; the last one is also the width of the output conv.
  std::vector<int> widths = {16, 16, 32, 64, 128};
  /// Three stage widths plus the output width.
  std::vector<int> context_widths = {16, 32, 64, 128};
  int crop_interval = 8;
};

struct ModelConfig {
  EncoderConfig encoder;
  GeneratorConfig generator;
  CriticConfig critic;

  /// Full-size networks: 288x512 images,
  /// 64 generated frames, 256-d scene features.
  static ModelConfig full_scale();
  /// Channel widths divided by four, 16 frames, 128x256 images.
  static ModelConfig desk();

  int frames() const { return generator.output_length(); }
  int crop_height() const { return encoder.image_height / 4; }
  int crop_width() const { return encoder.image_width / 4; }
  void validate() const;
};

void to_json(nlohmann::json& j, const EncoderConfig& c);
void from_json(const nlohmann::json& j, EncoderConfig& c);
void to_json(nlohmann::json& j, const GeneratorConfig& c);
void from_json(const nlohmann::json& j, GeneratorConfig& c);
void to_json(nlohmann::json& j, const CriticConfig& c);
void from_json(const nlohmann::json& j, CriticConfig& c);
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

}  // namespace scenemotion
