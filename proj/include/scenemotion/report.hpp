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

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "scenemotion/dataset.hpp"
#include "scenemotion/evaluation.hpp"

namespace scenemotion {

struct EvalOptions {
  uint64_t seed = 0;
  ERDConfig erd;
  /// Endpoint filter for the diversity curve; unset reports all samples.
  std::optional<double> endpoint_tolerance;
};

/// Motion FID against the real set (plus a white-noise baseline), the
/// collision grid of the generated motions against their scenes, and the
/// mean per-scene trajectory spread.
nlohmann::json evaluate(const Dataset& real, const Dataset& generated, const EvalOptions& opts);

/// Mean std-over-time curve across scenes with at least two generated motions.
std::vector<double> scene_std_curve(const Dataset& data, std::optional<double> endpoint_tolerance);

/// Writes std_curve.svg and fid.svg for an evaluation report.
std::vector<std::filesystem::path> plot_report(const nlohmann::json& report, const std::filesystem::path& dir);

}  // namespace scenemotion
