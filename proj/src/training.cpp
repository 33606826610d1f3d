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

#include "scenemotion/training.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "scenemotion/checkpoint.hpp"
#include "scenemotion/error.hpp"

using nlohmann::json;

namespace scenemotion {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train config: learning_rate must be positive");
  if (!(gp_lambda >= 0.0)) throw ConfigError("train config: gp_lambda must be >= 0");
  if (!(gp_target >= 0.0)) throw ConfigError("train config: gp_target must be >= 0");
  if (n_critic < 1) throw ConfigError("train config: n_critic must be >= 1");
  if (epochs < 0 || steps < 0) throw ConfigError("train config: epochs and steps must be >= 0");
  if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
  if (threads < 1) throw ConfigError("train config: threads must be >= 1");
  for (double w : {w_traj, w_pose, w_proj, w_context, w_depth})
    if (!(w >= 0.0)) throw ConfigError("train config: loss weights must be >= 0");
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"learning_rate", c.learning_rate},
           {"betas", {c.beta1, c.beta2}},
           {"gp_lambda", c.gp_lambda},
           {"gp_target", c.gp_target},
           {"n_critic", c.n_critic},
           {"epochs", c.epochs},
           {"steps", c.steps},
           {"batch_size", c.batch_size},
           {"w_traj", c.w_traj},
           {"w_pose", c.w_pose},
           {"w_proj", c.w_proj},
           {"w_context", c.w_context},
           {"w_depth", c.w_depth},
           {"flags",
            {{"M", c.flags.factorized}, {"D", c.flags.depth}, {"P", c.flags.projection}, {"C", c.flags.context}}},
           {"seed", c.seed},
           {"threads", c.threads},
           {"checkpoint_every", c.checkpoint_every},
           {"isolation_every", c.isolation_every}};
}

void from_json(const json& j, TrainConfig& c) {
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  if (j.contains("betas")) {
    c.beta1 = j.at("betas").at(0).get<double>();
    c.beta2 = j.at("betas").at(1).get<double>();
  }
  c.gp_lambda = j.value("gp_lambda", c.gp_lambda);
  c.gp_target = j.value("gp_target", c.gp_target);
  c.n_critic = j.value("n_critic", c.n_critic);
  c.epochs = j.value("epochs", c.epochs);
  c.steps = j.value("steps", c.steps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.w_traj = j.value("w_traj", c.w_traj);
  c.w_pose = j.value("w_pose", c.w_pose);
  c.w_proj = j.value("w_proj", c.w_proj);
  c.w_context = j.value("w_context", c.w_context);
  c.w_depth = j.value("w_depth", c.w_depth);
  if (j.contains("flags")) {
    const auto& f = j.at("flags");
    c.flags.factorized = f.value("M", c.flags.factorized);
    c.flags.depth = f.value("D", c.flags.depth);
    c.flags.projection = f.value("P", c.flags.projection);
    c.flags.context = f.value("C", c.flags.context);
  }
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  c.isolation_every = j.value("isolation_every", c.isolation_every);
}

TrainBatch make_batch(const Dataset& data, const std::vector<int64_t>& indices) {
  if (indices.empty()) throw ValidationError("make_batch: empty batch");
  std::vector<torch::Tensor> images, depths, valids, joints;
  TrainBatch b;
  for (int64_t i : indices) {
    const auto& m = data.motions.at(i);
    const auto& s = data.scenes.at(m.scene);
    images.push_back(s.image.to(torch::kFloat32));
    depths.push_back(s.depth.values.to(torch::kFloat32));
    valids.push_back(s.depth.valid);
    joints.push_back(m.joints.to(torch::kFloat32));
    b.cams.push_back(s.intrinsics);
  }
  b.image = torch::stack(images);
  b.depth = torch::stack(depths);
  b.depth_valid = torch::stack(valids);
  b.joints = torch::stack(joints);
  b.initial_pose = b.joints.select(3, 0).contiguous();
  return b;
}

torch::Tensor gradient_penalty(const CriticFn& critic, const std::vector<torch::Tensor>& real,
                               const std::vector<torch::Tensor>& fake, double lambda,
                               double gamma, at::Generator& gen) {
  if (real.empty() || real.size() != fake.size())
    throw ValidationError("gradient_penalty: real and fake input lists must match");
  const int64_t batch = real[0].size(0);
  for (size_t i = 0; i < real.size(); ++i) {
    if (!real[i].sizes().equals(fake[i].sizes()) || real[i].size(0) != batch)
      throw ValidationError("gradient_penalty: real and fake batches must have matching shapes");
  }
  auto eps = torch::rand({batch}, gen, real[0].scalar_type());
  std::vector<torch::Tensor> mixed;
  for (size_t i = 0; i < real.size(); ++i) {
    std::vector<int64_t> shape(real[i].dim(), 1);
    shape[0] = batch;
    auto e = eps.view(shape);
    mixed.push_back((e * real[i].detach() + (1 - e) * fake[i].detach()).requires_grad_(true));
  }
  auto scores = critic(mixed);
  auto grads = torch::autograd::grad({scores.sum()}, mixed, {}, /*retain_graph=*/true,
                                     /*create_graph=*/true);
  torch::Tensor sq = torch::zeros({batch}, scores.options());
  for (size_t i = 0; i < grads.size(); ++i) {
    if (!grads[i].defined()) continue;
    if (!torch::isfinite(grads[i]).all().item<bool>()) {
      std::ostringstream msg;
      msg << "gradient_penalty: non-finite gradient for input " << i << " (shape "
          << grads[i].sizes() << ", score range [" << scores.min().item<double>() << ", "
          << scores.max().item<double>() << "])";
      throw NumericalError(msg.str());
    }
    sq = sq + grads[i].pow(2).reshape({batch, -1}).sum(1);
  }
  auto norm = torch::sqrt(sq + 1e-12);
  return lambda * (norm - gamma).pow(2).mean();
}

namespace {

void check_finite(const LossReport& r, const std::string& where) {
  for (const auto& [k, v] : r) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << where << ": non-finite loss '" << k << "'; state:";
      for (const auto& [k2, v2] : r) msg << " " << k2 << "=" << v2;
      throw NumericalError(msg.str());
    }
  }
}

class FreezeGuard {
 public:
  explicit FreezeGuard(std::vector<torch::Tensor> params) : params_(std::move(params)) {
    for (auto& p : params_) p.requires_grad_(false);
  }
  ~FreezeGuard() {
    for (auto& p : params_) p.requires_grad_(true);
  }

 private:
  std::vector<torch::Tensor> params_;
};

torch::optim::AdamOptions adam_options(const TrainConfig& c) {
  return torch::optim::AdamOptions(c.learning_rate).betas({c.beta1, c.beta2});
}

}  // namespace

Trainer::Trainer(const ModelConfig& model, const TrainConfig& cfg)
    : cfg_(cfg), model_(model), rng_(make_generator(cfg.seed ^ 0x5eedf00dULL)) {
  cfg_.validate();
  model_.validate();
  torch::set_num_threads(cfg_.threads);
  torch::manual_seed(cfg_.seed);
  const auto graph = SkeletonGraph::default19();
  stack_ = GeneratorStack(model_, graph, cfg_.flags.factorized);
  critics_ = CriticSet(model_, graph, cfg_.flags);
  gen_opt_ = std::make_unique<torch::optim::Adam>(stack_->parameters(), adam_options(cfg_));
  auto add = [&](const std::string& name, torch::nn::Module* m) {
    if (m) critic_opts_[name] = std::make_unique<torch::optim::Adam>(m->parameters(), adam_options(cfg_));
  };
  add("traj", critics_->trajectory ? critics_->trajectory.get() : nullptr);
  add("pose", critics_->pose ? critics_->pose.get() : nullptr);
  add("proj", critics_->projection ? critics_->projection.get() : nullptr);
  add("context", critics_->context ? critics_->context.get() : nullptr);
}

std::vector<torch::Tensor> Trainer::critic_parameters() { return critics_->parameters(); }

std::vector<torch::Tensor> Trainer::generator_parameters() { return stack_->parameters(); }

CriticInputOptions Trainer::input_options() const {
  CriticInputOptions o;
  o.projection = static_cast<bool>(critics_->projection);
  o.context = static_cast<bool>(critics_->context);
  o.crop_height = model_.crop_height();
  o.crop_width = model_.crop_width();
  o.crop_interval = model_.critic.crop_interval;
  return o;
}

LossReport Trainer::critic_step(const TrainBatch& batch) {
  LossReport report;
  if (critic_opts_.empty()) return report;
  const auto opts = input_options();
  const int root = stack_->graph().root_index();
  stack_->train();
  GeneratedMotion fake;
  torch::Tensor depth;
  {
    torch::NoGradGuard no_grad;
    fake = stack_->forward(batch.image, batch.initial_pose, rng_);
    if (opts.context) depth = stack_->encoder->predict_depth(fake.scene);
  }
  const auto f = fake.scene.f_scene.detach();
  const auto& p0 = batch.initial_pose;
  auto real_in = build_critic_inputs(batch.joints, p0, depth, batch.cams, root, opts);
  auto fake_in = build_critic_inputs(fake.joints.detach(), p0, depth, batch.cams, root, opts);

  auto run = [&](const std::string& name, const CriticFn& fn, const std::vector<torch::Tensor>& real,
                 const std::vector<torch::Tensor>& gen_in) {
    auto& opt = *critic_opts_.at(name);
    opt.zero_grad();
    auto d_real = fn(real).mean();
    auto d_fake = fn(gen_in).mean();
    auto gp = gradient_penalty(fn, real, gen_in, cfg_.gp_lambda, cfg_.gp_target, rng_);
    auto loss = d_fake - d_real + gp;
    LossReport r{{"critic_" + name, loss.item<double>()}, {"gp_" + name, gp.item<double>()}};
    check_finite(r, "critic_step");
    loss.backward();
    opt.step();
    report.insert(r.begin(), r.end());
  };

  if (critics_->trajectory) {
    run("traj", [&](const std::vector<torch::Tensor>& x) { return critics_->trajectory->forward(x[0], f, p0); },
        {real_in.positions}, {fake_in.positions});
  }
  if (critics_->pose) {
    run("pose", [&](const std::vector<torch::Tensor>& x) { return critics_->pose->forward(x[0], x[1], f); },
        {real_in.poses, real_in.track}, {fake_in.poses, fake_in.track});
  }
  if (critics_->projection) {
    run("proj", [&](const std::vector<torch::Tensor>& x) { return critics_->projection->forward(x[0], f); },
        {real_in.motion2d}, {fake_in.motion2d});
  }
  if (critics_->context) {
    run("context", [&](const std::vector<torch::Tensor>& x) { return critics_->context->forward(x[0]); },
        {real_in.crops}, {fake_in.crops});
  }
  return report;
}

torch::Tensor Trainer::generator_loss(const TrainBatch& batch, at::Generator& gen, LossReport* report) {
  const auto opts = input_options();
  const int root = stack_->graph().root_index();
  const auto& p0 = batch.initial_pose;
  auto fake = stack_->forward(batch.image, p0, gen);
  const auto f = fake.scene.f_scene.detach();

  torch::Tensor predicted;
  if (cfg_.flags.depth) {
    predicted = stack_->encoder->predict_depth(fake.scene);
  } else if (opts.context) {
    torch::NoGradGuard no_grad;
    predicted = stack_->encoder->predict_depth(fake.scene);
  }
  auto crop_depth = predicted.defined() ? predicted.detach() : predicted;
  auto in = build_critic_inputs(fake.joints, p0, crop_depth, batch.cams, root, opts);

  LossReport r;
  auto total = torch::zeros({}, fake.joints.options());
  auto adversarial = [&](const std::string& key, double w, const torch::Tensor& scores) {
    auto term = -scores.mean();
    r[key] = term.item<double>();
    total = total + w * term;
  };
  if (critics_->trajectory) adversarial("gen_traj", cfg_.w_traj, critics_->trajectory->forward(in.positions, f, p0));
  if (critics_->pose) adversarial("gen_pose", cfg_.w_pose, critics_->pose->forward(in.poses, in.track, f));
  if (critics_->projection) adversarial("gen_proj", cfg_.w_proj, critics_->projection->forward(in.motion2d, f));
  if (critics_->context) adversarial("gen_context", cfg_.w_context, critics_->context->forward(in.crops));
  if (cfg_.flags.depth) {
    auto d = berhu_loss(predicted, batch.depth, batch.depth_valid);
    r["depth"] = d.item<double>();
    total = total + cfg_.w_depth * d;
  }
  if (report) *report = r;
  return total;
}

LossReport Trainer::generator_step(const TrainBatch& batch) {
  stack_->train();
  FreezeGuard freeze(critic_parameters());
  gen_opt_->zero_grad();
  LossReport r;
  auto total = generator_loss(batch, rng_, &r);
  check_finite(r, "generator_step");
  total.backward();
  gen_opt_->step();
  return r;
}

json log_record_json(const LogRecord& r, bool include_wall_time) {
  json j = {{"step", r.step}, {"losses", r.losses}};
  if (include_wall_time) j["wall_time"] = r.wall_time;
  return j;
}

std::string TrainingLog::to_ndjson(bool include_wall_time) const {
  std::string out;
  for (const auto& r : records) out += log_record_json(r, include_wall_time).dump() + "\n";
  return out;
}

CheckpointSink directory_sink(const std::filesystem::path& dir, uint64_t seed) {
  return [dir, seed](const std::string& tag, int64_t step, GeneratorStack& stack) {
    save_checkpoint(dir / tag, stack, step, seed);
  };
}

TrainingLog fit(Trainer& trainer, const Dataset& data, const CheckpointSink& sink,
                const std::function<void(const LogRecord&)>& log_line) {
  const auto& cfg = trainer.config();
  const int64_t n = static_cast<int64_t>(data.motions.size());
  const int64_t per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const int64_t iterations = cfg.steps > 0 ? cfg.steps : cfg.epochs * per_epoch;
  TrainingLog log;
  if (iterations > 0 && n == 0) throw ValidationError("fit: dataset has no motions");

  std::vector<int64_t> order;
  size_t cursor = 0;
  auto next_batch = [&] {
    std::vector<int64_t> idx;
    while (static_cast<int>(idx.size()) < cfg.batch_size) {
      if (cursor == order.size()) {
        auto perm = torch::randperm(n, trainer.rng(), torch::kLong);
        order.assign(perm.data_ptr<int64_t>(), perm.data_ptr<int64_t>() + n);
        cursor = 0;
      }
      idx.push_back(order[cursor++]);
    }
    return make_batch(data, idx);
  };

  const auto t0 = std::chrono::steady_clock::now();
  for (int64_t it = 1; it <= iterations; ++it) {
    const bool check = cfg.isolation_every > 0 && it % cfg.isolation_every == 0;
    try {
      LossReport sum;
      const uint64_t gen_before = check ? tensor_hash(trainer.generator_parameters()) : 0;
      for (int k = 0; k < cfg.n_critic; ++k) {
        for (const auto& [key, v] : trainer.critic_step(next_batch())) sum[key] += v / cfg.n_critic;
      }
      if (check && tensor_hash(trainer.generator_parameters()) != gen_before)
        throw std::logic_error("fit: a critic step modified generator parameters");
      const uint64_t critic_before = check ? tensor_hash(trainer.critic_parameters()) : 0;
      auto g = trainer.generator_step(next_batch());
      if (check && tensor_hash(trainer.critic_parameters()) != critic_before)
        throw std::logic_error("fit: a generator step modified critic parameters");
      sum.insert(g.begin(), g.end());
      LogRecord rec{it, sum,
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
      if (log_line) log_line(rec);
      log.records.push_back(std::move(rec));
    } catch (const NumericalError&) {
      if (sink) sink("nan_dump", it, trainer.stack());
      throw;
    }
    if (sink && cfg.checkpoint_every > 0 && it % cfg.checkpoint_every == 0 && it != iterations) {
      char tag[32];
      std::snprintf(tag, sizeof tag, "step_%06lld", static_cast<long long>(it));
      sink(tag, it, trainer.stack());
    }
  }
  if (sink) sink("final", iterations, trainer.stack());
  return log;
}

TrainingLog fit(const Dataset& data, const ModelConfig& model, const TrainConfig& cfg,
                const CheckpointSink& sink, const std::function<void(const LogRecord&)>& log_line) {
  Trainer trainer(model, cfg);
  return fit(trainer, data, sink, log_line);
}

}  // namespace scenemotion
