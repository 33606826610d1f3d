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

#include "scenemotion/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "scenemotion/core_motion.hpp"
#include "scenemotion/error.hpp"

using nlohmann::json;

namespace scenemotion {

namespace {

std::vector<torch::Tensor> joints_of(const Dataset& d) {
  std::vector<torch::Tensor> out;
  for (const auto& m : d.motions) out.push_back(m.joints);
  return out;
}

}  // namespace

std::vector<double> scene_std_curve(const Dataset& data, std::optional<double> endpoint_tolerance) {
  std::map<int, std::vector<torch::Tensor>> by_scene;
  for (const auto& m : data.motions) {
    auto track = root_track(m.joints.to(torch::kFloat64), 0);  // (T, 3)
    by_scene[m.scene].push_back(track - track[0]);
  }
  std::vector<double> mean;
  int groups = 0;
  for (const auto& [scene, tracks] : by_scene) {
    if (tracks.size() < 2) continue;
    auto curve = trajectory_std_curve(torch::stack(tracks), endpoint_tolerance);
    if (mean.empty()) mean.assign(curve.size(), 0.0);
    for (size_t t = 0; t < curve.size(); ++t) mean[t] += curve[t];
    ++groups;
  }
  for (double& v : mean) v /= std::max(groups, 1);
  return mean;
}

json evaluate(const Dataset& real, const Dataset& generated, const EvalOptions& opts) {
  const auto real_m = joints_of(real);
  const auto gen_m = joints_of(generated);
  if (real_m.size() < 2 || gen_m.size() < 2)
    throw ValidationError("eval: need at least 2 motions in both the real and generated sets");
  const int frames = static_cast<int>(real_m[0].size(-1));
  for (const auto& m : gen_m)
    if (m.size(-1) != frames)
      throw ValidationError("eval: generated motions must have the real frame count " + std::to_string(frames));

  ERDConfig erd = opts.erd;
  erd.seed = opts.seed;
  auto suite = train_erd_suite(real_m, frames, erd);
  auto fid = motion_fid(real_m, gen_m, suite);
  auto noise = white_noise_motions(real_m, static_cast<int>(gen_m.size()), opts.seed + 1);
  auto noise_fid = motion_fid(real_m, noise, suite);

  const auto graph = SkeletonGraph::default19();
  std::vector<PointGrid> grids;
  grids.reserve(generated.scenes.size());
  for (const auto& s : generated.scenes) grids.emplace_back(s.cloud, 0.1);
  std::vector<const PointGrid*> motion_grids;
  for (const auto& m : generated.motions) motion_grids.push_back(&grids.at(m.scene));
  auto collision = collision_report(gen_m, motion_grids, graph);

  return json{{"frames", frames},
              {"counts", {{"real", real_m.size()}, {"generated", gen_m.size()}}},
              {"fid", to_json(fid)},
              {"noise_baseline_fid", to_json(noise_fid)},
              {"collision", to_json(collision)},
              {"std_curve", scene_std_curve(generated, opts.endpoint_tolerance)}};
}

namespace {

struct Svg {
  std::ostringstream body;
  double width = 640, height = 400, left = 60, right = 20, top = 40, bottom = 50;

  double px(double x, double x0, double x1) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y, double y0, double y1) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }

  void axes(const std::string& title, const std::string& xlabel, const std::string& ylabel, double y0, double y1) {
    body << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
    body << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
         << height - bottom << "\" stroke=\"black\"/>\n";
    body << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
         << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double v = y0 + (y1 - y0) * i / 4.0;
      body << "<text x=\"" << left - 6 << "\" y=\"" << py(v, y0, y1) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
           << std::setprecision(3) << v << "</text>\n";
    }
    body << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
         << xlabel << "</text>\n";
    body << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 " << height / 2
         << ")\" text-anchor=\"middle\" font-size=\"12\">" << ylabel << "</text>\n";
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(DataErrorCode::kIo, "cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body.str() << "</svg>\n";
  }
};

}  // namespace

std::vector<std::filesystem::path> plot_report(const json& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  try {
    const auto curve = report.at("std_curve").get<std::vector<double>>();
    Svg svg;
    double y1 = 1e-6;
    for (double v : curve) y1 = std::max(y1, v);
    y1 *= 1.1;
    svg.axes("Trajectory spread over time", "frame", "std (m)", 0.0, y1);
    if (!curve.empty()) {
      svg.body << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
      const double x1 = std::max<double>(1.0, static_cast<double>(curve.size() - 1));
      for (size_t t = 0; t < curve.size(); ++t)
        svg.body << svg.px(static_cast<double>(t), 0.0, x1) << "," << svg.py(curve[t], 0.0, y1) << " ";
      svg.body << "\"/>\n";
    }
    svg.save(dir / "std_curve.svg");
    written.push_back(dir / "std_curve.svg");

    const auto& cells = report.at("fid").at("cells");
    const json* noise = report.contains("noise_baseline_fid") ? &report.at("noise_baseline_fid").at("cells") : nullptr;
    Svg bars;
    double top = 1e-6;
    for (const auto& c : cells) top = std::max(top, c.at("fid").get<double>());
    if (noise)
      for (const auto& c : *noise) top = std::max(top, c.at("fid").get<double>());
    top *= 1.1;
    bars.axes("Motion FID per (model length, clip length)", "model / clip length", "FID", 0.0, top);
    const size_t n = cells.size();
    const double slot = (bars.width - bars.left - bars.right) / std::max<size_t>(n, 1);
    for (size_t i = 0; i < n; ++i) {
      auto bar = [&](double v, double offset, const char* colour) {
        const double y = bars.py(v, 0.0, top);
        bars.body << "<rect x=\"" << bars.left + i * slot + offset << "\" y=\"" << y << "\" width=\"" << slot * 0.35
                  << "\" height=\"" << bars.height - bars.bottom - y << "\" fill=\"" << colour << "\"/>\n";
      };
      bar(cells[i].at("fid").get<double>(), slot * 0.1, "#1f77b4");
      if (noise && i < noise->size()) bar((*noise)[i].at("fid").get<double>(), slot * 0.5, "#d62728");
      bars.body << "<text x=\"" << bars.left + (i + 0.5) * slot << "\" y=\"" << bars.height - bars.bottom + 14
                << "\" text-anchor=\"middle\" font-size=\"10\">" << cells[i].at("model_length").get<int>() << "/"
                << cells[i].at("clip_length").get<int>() << "</text>\n";
    }
    bars.save(dir / "fid.svg");
    written.push_back(dir / "fid.svg");
  } catch (const json::exception& e) {
    throw DataError(DataErrorCode::kMalformed, std::string("plot: malformed report: ") + e.what());
  }
  return written;
}

}  // namespace scenemotion
