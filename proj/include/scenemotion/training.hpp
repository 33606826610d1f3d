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

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenemotion/dataset.hpp"
#include "scenemotion/model.hpp"

namespace scenemotion {

struct TrainConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double gp_lambda = 10.0;
  double gp_target = 0.1;
  int n_critic = 5;
  int epochs = 1;
  /// When positive, overrides `epochs` with an exact number of iterations
  /// (one iteration = n_critic critic steps + one generator step).
  int steps = 0;
  int batch_size = 8;
  double w_traj = 1.0;
  double w_pose = 1.0;
  double w_proj = 1.0;
  double w_context = 1.0;
  double w_depth = 1.0;
  AblationFlags flags;
  uint64_t seed = 0;
  int threads = 1;
  /// Iterations between checkpoints; 0 writes only the final one.
  int checkpoint_every = 0;
  /// Iterations between parameter-isolation checks; 0 disables them.
  int isolation_every = 0;

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

/// Loss components by name, e.g. "critic_traj", "gp_pose", "gen_proj", "depth".
using LossReport = std::map<std::string, double>;

/// One mini-batch: images, ground-truth depth, cameras and real motions.
struct TrainBatch {
  torch::Tensor image;          // (B, 3, H, W)
  torch::Tensor depth;          // (B, H, W) ground truth
  torch::Tensor depth_valid;    // (B, H, W) bool
  std::vector<CameraIntrinsics> cams;
  torch::Tensor joints;         // (B, 3, J, T) real motions, camera frame
  torch::Tensor initial_pose;   // (B, 3, J) first frame of each real motion
};

/// Collates dataset motions `indices` with their scenes.
TrainBatch make_batch(const Dataset& data, const std::vector<int64_t>& indices);

/// lambda * mean_b (||grad_x critic(x_hat)_b|| - gamma)^2 with
/// x_hat = eps * real + (1 - eps) * fake, eps ~ U(0, 1) per sample. Every
/// tensor in `real` / `fake` is interpolated with the same eps; the gradient
/// norm is taken over all of them jointly. The result keeps its graph.
using CriticFn = std::function<torch::Tensor(const std::vector<torch::Tensor>&)>;
torch::Tensor gradient_penalty(const CriticFn& critic, const std::vector<torch::Tensor>& real,
                               const std::vector<torch::Tensor>& fake, double lambda,
                               double gamma, at::Generator& gen);

/// Generator stack, critics and their optimizers.
class Trainer {
 public:
  Trainer(const ModelConfig& model, const TrainConfig& cfg);

  /// n_critic = 1 critic update for every enabled critic on one batch.
  LossReport critic_step(const TrainBatch& batch);
  /// One joint update of encoder and generators.
  LossReport generator_step(const TrainBatch& batch);
  /// Generator objective without updating anything; uses `gen` for latents.
  torch::Tensor generator_loss(const TrainBatch& batch, at::Generator& gen, LossReport* report = nullptr);

  GeneratorStack& stack() { return stack_; }
  CriticSet& critics() { return critics_; }
  const TrainConfig& config() const { return cfg_; }
  at::Generator& rng() { return rng_; }
  /// Parameters of every enabled critic.
  std::vector<torch::Tensor> critic_parameters();
  std::vector<torch::Tensor> generator_parameters();

 private:
  CriticInputOptions input_options() const;
  TrainConfig cfg_;
  ModelConfig model_;
  GeneratorStack stack_{nullptr};
  CriticSet critics_{nullptr};
  at::Generator rng_;
  std::unique_ptr<torch::optim::Adam> gen_opt_;
  std::map<std::string, std::unique_ptr<torch::optim::Adam>> critic_opts_;
};

struct LogRecord {
  int64_t step = 0;
  LossReport losses;
  double wall_time = 0.0;
};

struct TrainingLog {
  std::vector<LogRecord> records;
  /// NDJSON, one record per line.
  std::string to_ndjson(bool include_wall_time = true) const;
};

/// Called with (tag, iteration, stack); tags are "step_XXXXXX" for periodic
/// checkpoints, "final" at the end and "nan_dump" on a numerical failure.
using CheckpointSink = std::function<void(const std::string&, int64_t, GeneratorStack&)>;
/// Sink writing each checkpoint to `dir/<tag>`.
CheckpointSink directory_sink(const std::filesystem::path& dir, uint64_t seed);

/// Alternates n_critic critic steps with one generator step. `log_line`, when
/// given, receives each record as it is produced. A non-finite loss writes a
/// state dump through the sink before the error propagates.
TrainingLog fit(Trainer& trainer, const Dataset& data, const CheckpointSink& sink = {},
                const std::function<void(const LogRecord&)>& log_line = {});
TrainingLog fit(const Dataset& data, const ModelConfig& model, const TrainConfig& cfg,
                const CheckpointSink& sink = {},
                const std::function<void(const LogRecord&)>& log_line = {});

nlohmann::json log_record_json(const LogRecord& r, bool include_wall_time = true);

}  // namespace scenemotion
