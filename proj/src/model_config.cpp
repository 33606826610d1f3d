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

#include "scenemotion/model_config.hpp"

#include "scenemotion/error.hpp"

namespace scenemotion {

int GeneratorConfig::output_length() const { return (1 << doublings) * (t0 - 2); }

void GeneratorConfig::validate() const {
  if (t0 < 3) throw ConfigError("generator: t0 must be >= 3 (first stage removes two frames)");
  if (doublings < 0 || doublings > 12) throw ConfigError("generator: doublings out of range");
  if (!(alpha > 0.0)) throw ConfigError("generator: alpha must be positive");
  if (trajectory_noise < 1 || pose_noise < 1) throw ConfigError("generator: noise width must be >= 1");
  if (static_cast<int>(trajectory_widths.size()) != doublings + 1 ||
      static_cast<int>(pose_widths.size()) != doublings + 1)
    throw ConfigError("generator: need doublings + 1 stage widths");
}

void ModelConfig::validate() const {
  generator.validate();
  if (encoder.image_height < 16 || encoder.image_width < 16 || encoder.image_height % 16 != 0 ||
      encoder.image_width % 16 != 0)
    throw ConfigError("encoder: image size must be a positive multiple of 16");
  if (encoder.widths.size() != 4) throw ConfigError("encoder: expected four widths");
  if (encoder.feature_channels < 1) throw ConfigError("encoder: feature channels must be >= 1");
  if (critic.widths.size() != 5) throw ConfigError("critic: expected five stage widths");
  if (critic.context_widths.size() != 4) throw ConfigError("critic: expected four context widths");
  if (critic.crop_interval < 1) throw ConfigError("critic: crop interval must be >= 1");
}

ModelConfig ModelConfig::full_scale() {
  ModelConfig c;
  c.encoder.image_height = 288;
  c.encoder.image_width = 512;
  c.encoder.widths = {64, 128, 256, 512};
  c.encoder.feature_channels = 256;
  c.generator.t0 = 6;
  c.generator.doublings = 4;
  c.generator.trajectory_noise = 256;
  c.generator.pose_noise = 1024;
  c.generator.trajectory_widths = {512, 256, 128, 64, 32};
  c.generator.pose_widths = {512, 256, 128, 64, 32};
  c.generator.full_scale = true;
  c.critic.widths = {64, 64, 128, 256, 512};
  c.critic.context_widths = {64, 128, 256, 512};
  return c;
}

ModelConfig ModelConfig::desk() { return ModelConfig{}; }

void to_json(nlohmann::json& j, const EncoderConfig& c) {
  j = {{"image_height", c.image_height},
       {"image_width", c.image_width},
       {"widths", c.widths},
       {"feature_channels", c.feature_channels}};
}

void from_json(const nlohmann::json& j, EncoderConfig& c) {
  c.image_height = j.value("image_height", c.image_height);
  c.image_width = j.value("image_width", c.image_width);
  c.widths = j.value("widths", c.widths);
  c.feature_channels = j.value("feature_channels", c.feature_channels);
}

void to_json(nlohmann::json& j, const GeneratorConfig& c) {
  j = {{"t0", c.t0},
       {"doublings", c.doublings},
       {"alpha", c.alpha},
       {"trajectory_noise", c.trajectory_noise},
       {"pose_noise", c.pose_noise},
       {"trajectory_widths", c.trajectory_widths},
       {"pose_widths", c.pose_widths},
       {"full_scale", c.full_scale}};
}

void from_json(const nlohmann::json& j, GeneratorConfig& c) {
  c.t0 = j.value("t0", c.t0);
  c.doublings = j.value("doublings", c.doublings);
  c.alpha = j.value("alpha", c.alpha);
  c.trajectory_noise = j.value("trajectory_noise", c.trajectory_noise);
  c.pose_noise = j.value("pose_noise", c.pose_noise);
  c.trajectory_widths = j.value("trajectory_widths", c.trajectory_widths);
  c.pose_widths = j.value("pose_widths", c.pose_widths);
  c.full_scale = j.value("full_scale", c.full_scale);
}

void to_json(nlohmann::json& j, const CriticConfig& c) {
  j = {{"widths", c.widths}, {"context_widths", c.context_widths}, {"crop_interval", c.crop_interval}};
}

void from_json(const nlohmann::json& j, CriticConfig& c) {
  c.widths = j.value("widths", c.widths);
  c.context_widths = j.value("context_widths", c.context_widths);
  c.crop_interval = j.value("crop_interval", c.crop_interval);
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"encoder", c.encoder}, {"generator", c.generator}, {"critic", c.critic}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  if (j.value("full_scale", false)) c = ModelConfig::full_scale();
  // Partial sections override the defaults field by field.
  if (j.contains("encoder")) from_json(j.at("encoder"), c.encoder);
  if (j.contains("generator")) from_json(j.at("generator"), c.generator);
  if (j.contains("critic")) from_json(j.at("critic"), c.critic);
}

}  // namespace scenemotion
