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

#include "scenemotion/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scenemotion/checkpoint.hpp"
#include "scenemotion/dataset.hpp"
#include "scenemotion/error.hpp"
#include "scenemotion/report.hpp"
#include "scenemotion/sampling.hpp"
#include "scenemotion/training.hpp"

using nlohmann::json;

namespace scenemotion {

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw DataError(DataErrorCode::kIo, "cannot write " + path.string());
}

/// Training config file: {"model": {...}, "train": {...}}; both sections are
/// optional and override the desk-scale model and default training settings.
std::pair<ModelConfig, TrainConfig> load_train_config(const std::filesystem::path& path) {
  ModelConfig model = ModelConfig::desk();
  TrainConfig train;
  if (path.empty()) return {model, train};
  const json j = read_json_file(path);
  try {
    if (j.contains("model")) from_json(j.at("model"), model);
    if (j.contains("train")) from_json(j.at("train"), train);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return {model, train};
}

struct GenDataArgs {
  uint64_t seed = 0;
  int scenes = 1;
  int walks = 1;
  int frames = 16;
  int threads = 0;
  std::string out;
};

struct TrainArgs {
  std::string data, config, out, ablate;
  int steps = -1;
  int64_t seed = -1;
  int threads = 0;
};

struct SampleArgs {
  std::string checkpoint, data, scene = "all", out;
  int n = 1;
  uint64_t seed = 0;
};

struct EvalArgs {
  std::string real, generated, out;
  uint64_t seed = 0;
  int erd_steps = -1;
  double endpoint_tolerance = -1.0;
};

struct PlotArgs {
  std::string report, out;
};

int gen_data(const GenDataArgs& a, std::ostream& out) {
  if (a.scenes < 1 || a.walks < 1) throw ConfigError("gen-data: --scenes and --walks-per-scene must be >= 1");
  WalkConfig walk;
  walk.frames = a.frames;
  auto data = generate_dataset(a.seed, a.scenes, a.walks, SceneConfig{}, walk, a.threads);
  auto manifest = write_dataset(a.out, data);
  out << "wrote " << manifest.scenes.size() << " scenes, " << manifest.motions.size() << " motions to " << a.out
      << "\n";
  return kExitOk;
}

int train(const TrainArgs& a, std::ostream& out) {
  auto [model, cfg] = load_train_config(a.config);
  if (!a.ablate.empty()) cfg.flags = AblationFlags::without(a.ablate);
  if (a.steps >= 0) cfg.steps = a.steps;
  if (a.seed >= 0) cfg.seed = static_cast<uint64_t>(a.seed);
  if (a.threads > 0) cfg.threads = a.threads;
  model.validate();
  cfg.validate();

  auto data = read_dataset(a.data);
  if (data.frames != model.frames())
    throw ConfigError("train: dataset has " + std::to_string(data.frames) + " frames but the model generates " +
                      std::to_string(model.frames()));

  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir);
  json used;
  to_json(used["model"], model);
  to_json(used["train"], cfg);
  write_text(dir / "config.json", used.dump(2) + "\n");

  std::ofstream log(dir / "train_log.ndjson", std::ios::trunc);
  if (!log) throw DataError(DataErrorCode::kIo, "cannot write " + (dir / "train_log.ndjson").string());
  auto sink = directory_sink(dir / "checkpoints", cfg.seed);
  auto result = fit(data, model, cfg, sink, [&](const LogRecord& r) {
    log << log_record_json(r, false).dump() << "\n";
    log.flush();
  });
  out << "trained " << result.records.size() << " iterations (" << cfg.flags.label() << "), checkpoint at "
      << (dir / "checkpoints" / "final").string() << "\n";
  return kExitOk;
}

std::vector<int> parse_scenes(const std::string& spec, int count) {
  std::vector<int> scenes;
  if (spec == "all") {
    for (int i = 0; i < count; ++i) scenes.push_back(i);
    return scenes;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      scenes.push_back(v);
    } catch (const std::logic_error&) {
      throw ConfigError("sample: bad scene index '" + item + "'");
    }
  }
  if (scenes.empty()) throw ConfigError("sample: no scenes selected");
  return scenes;
}

int sample(const SampleArgs& a, std::ostream& out) {
  CheckpointInfo info;
  auto stack = load_checkpoint(a.checkpoint, &info);
  auto data = read_dataset(a.data);
  if (data.frames != stack->config().frames())
    throw ConfigError("sample: dataset frame count does not match the checkpoint");
  auto scenes = parse_scenes(a.scene, static_cast<int>(data.scenes.size()));
  auto generated = sample_dataset(stack, data, scenes, a.n, a.seed);
  write_dataset(a.out, generated);
  out << "wrote " << generated.motions.size() << " motions to " << a.out << "\n";
  return kExitOk;
}

int eval(const EvalArgs& a, std::ostream& out) {
  EvalOptions opts;
  opts.seed = a.seed;
  if (a.erd_steps >= 0) opts.erd.steps = a.erd_steps;
  if (a.endpoint_tolerance >= 0.0) opts.endpoint_tolerance = a.endpoint_tolerance;
  auto report = evaluate(read_dataset(a.real), read_dataset(a.generated), opts);
  const std::filesystem::path path(a.out);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_text(path, report.dump(2) + "\n");
  out << "FID average " << report["fid"]["average"].get<double>() << ", non-collision average "
      << report["collision"]["average"].get<double>() << "\n";
  return kExitOk;
}

int plot(const PlotArgs& a, std::ostream& out) {
  for (const auto& p : plot_report(read_json_file(a.report), a.out)) out << "wrote " << p.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scene-aware human motion generation"};
  app.require_subcommand(1);

  GenDataArgs g;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic scene/motion dataset");
  gen_cmd->add_option("--seed", g.seed)->required();
  gen_cmd->add_option("--scenes", g.scenes)->required();
  gen_cmd->add_option("--walks-per-scene", g.walks)->required();
  gen_cmd->add_option("--out", g.out)->required();
  gen_cmd->add_option("--frames", g.frames);
  gen_cmd->add_option("--threads", g.threads, "0 uses every core");

  TrainArgs t;
  auto* train_cmd = app.add_subcommand("train", "Train the generator and critics");
  train_cmd->add_option("--data", t.data)->required();
  train_cmd->add_option("--config", t.config, "JSON with optional \"model\" and \"train\" sections");
  train_cmd->add_option("--out", t.out)->required();
  train_cmd->add_option("--ablate", t.ablate, "comma-separated subset of M,D,P,C to disable");
  train_cmd->add_option("--steps", t.steps);
  train_cmd->add_option("--seed", t.seed);
  train_cmd->add_option("--threads", t.threads);

  SampleArgs s;
  auto* sample_cmd = app.add_subcommand("sample", "Sample motions from a checkpoint");
  sample_cmd->add_option("--checkpoint", s.checkpoint)->required();
  sample_cmd->add_option("--data", s.data, "dataset providing scenes and initial poses")->required();
  sample_cmd->add_option("--scene", s.scene, "scene index, comma list or 'all'");
  sample_cmd->add_option("--n", s.n, "samples per scene");
  sample_cmd->add_option("--out", s.out)->required();
  sample_cmd->add_option("--seed", s.seed);

  EvalArgs e;
  auto* eval_cmd = app.add_subcommand("eval", "Score generated motions against real ones");
  eval_cmd->add_option("--real", e.real)->required();
  eval_cmd->add_option("--generated", e.generated)->required();
  eval_cmd->add_option("--out", e.out)->required();
  eval_cmd->add_option("--seed", e.seed);
  eval_cmd->add_option("--erd-steps", e.erd_steps);
  eval_cmd->add_option("--endpoint-tolerance", e.endpoint_tolerance);

  PlotArgs p;
  auto* plot_cmd = app.add_subcommand("plot", "Render SVG plots of an evaluation report");
  plot_cmd->add_option("--report", p.report)->required();
  plot_cmd->add_option("--out", p.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << ex.what() << "\n";
    if (const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front()) err << sub->help();
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return gen_data(g, out);
    if (train_cmd->parsed()) return train(t, out);
    if (sample_cmd->parsed()) return sample(s, out);
    if (eval_cmd->parsed()) return eval(e, out);
    if (plot_cmd->parsed()) return plot(p, out);
  } catch (const DataError& ex) {
    err << "data error: " << ex.what() << "\n";
    return kExitData;
  } catch (const NumericalError& ex) {
    err << "numerical error: " << ex.what() << "\n";
    return kExitNumerical;
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& ex) {
    err << "invalid input: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& ex) {
    err << "data error: " << ex.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace scenemotion
