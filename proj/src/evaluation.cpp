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

#include "scenemotion/evaluation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "scenemotion/error.hpp"
#include "scenemotion/gp_latent.hpp"

namespace scenemotion {

ERDModelImpl::ERDModelImpl(int64_t pose_dim, int64_t clip_length, const ERDConfig& cfg)
    : pose_dim_(pose_dim), clip_length_(clip_length), hidden_(cfg.hidden) {
  encoder_ = register_module("encoder", torch::nn::Linear(pose_dim, cfg.encoder_width));
  cell_ = register_module(
      "cell", torch::nn::LSTM(torch::nn::LSTMOptions(cfg.encoder_width, cfg.hidden).batch_first(true)));
  decoder_ = register_module("decoder", torch::nn::Linear(cfg.hidden, pose_dim));
}

torch::Tensor ERDModelImpl::run(const torch::Tensor& clips, torch::Tensor* last_hidden) {
  if (clips.dim() != 3 || clips.size(2) != pose_dim_)
    throw ValidationError("erd: clips must be (N, L, " + std::to_string(pose_dim_) + ")");
  if (clips.size(1) > clip_length_)
    throw ValidationError("erd: clip of length " + std::to_string(clips.size(1)) +
                          " exceeds the model length " + std::to_string(clip_length_));
  auto h = torch::relu(encoder_->forward(clips));
  auto [out, state] = cell_->forward(h);
  if (last_hidden) *last_hidden = std::get<0>(state).squeeze(0);
  return out;
}

torch::Tensor ERDModelImpl::predict_next(const torch::Tensor& clips) {
  auto in = clips.narrow(1, 0, clips.size(1) - 1);
  auto out = run(in, nullptr);
  return in + decoder_->forward(out);
}

torch::Tensor ERDModelImpl::features(const torch::Tensor& clips) {
  torch::Tensor h;
  run(clips, &h);
  return h;
}

torch::Tensor extract_clips(const std::vector<torch::Tensor>& motions, int length, int root_index) {
  if (length < 1) throw ValidationError("extract_clips: length must be positive");
  std::vector<torch::Tensor> clips;
  for (const auto& m : motions) {
    if (m.dim() != 3 || m.size(0) != 3) throw ValidationError("extract_clips: motions must be (3, J, T)");
    auto x = m.to(torch::kFloat32);
    for (int64_t s = 0; s + length <= x.size(2); s += length) {
      auto w = x.narrow(2, s, length);
      auto origin = w.select(1, root_index).select(1, 0);  // (3)
      w = w - origin.view({3, 1, 1});
      clips.push_back(w.permute({2, 0, 1}).reshape({length, -1}));
    }
  }
  if (clips.empty()) return torch::empty({0, length, motions.empty() ? 0 : 3 * motions[0].size(1)});
  return torch::stack(clips);
}

ERDModel train_erd(const std::vector<torch::Tensor>& motions, int clip_length, const ERDConfig& cfg) {
  if (clip_length < 2) throw ValidationError("train_erd: clip length must be >= 2");
  auto clips = extract_clips(motions, clip_length);
  if (clips.size(0) < 2)
    throw ValidationError("train_erd: need at least 2 clips of length " + std::to_string(clip_length));
  torch::manual_seed(cfg.seed);
  auto gen = make_generator(cfg.seed);
  ERDModel model(clips.size(2), clip_length, cfg);
  torch::optim::Adam opt(model->parameters(), torch::optim::AdamOptions(cfg.learning_rate));
  const int64_t n = clips.size(0);
  for (int step = 0; step < cfg.steps; ++step) {
    auto batch = n <= cfg.batch ? clips : clips.index_select(0, torch::randint(n, {cfg.batch}, gen, torch::kLong));
    opt.zero_grad();
    auto pred = model->predict_next(batch);
    auto loss = torch::mse_loss(pred, batch.narrow(1, 1, clip_length - 1));
    loss.backward();
    opt.step();
  }
  model->eval();
  return model;
}

torch::Tensor erd_features(ERDModel& model, const torch::Tensor& clips) {
  torch::NoGradGuard no_grad;
  return model->features(clips);
}

Gaussian fit_gaussian(const torch::Tensor& features) {
  auto f = features.to(torch::kFloat64).contiguous();
  const int64_t n = f.size(0), d = f.size(1);
  if (n < 2) throw ValidationError("fit_gaussian: need at least 2 samples");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      f.data_ptr<double>(), n, d);
  Gaussian g;
  g.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centred = x.rowwise() - g.mean.transpose();
  g.cov = centred.transpose() * centred / static_cast<double>(n - 1);
  return g;
}

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

Eigen::VectorXd checked_eigenvalues(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                                    const char* what) {
  if (es.info() != Eigen::Success) throw NumericalError(std::string("frechet_distance: eigensolver failed on ") + what);
  const Eigen::VectorXd lambda = es.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() < -1e-6 * scale)
    throw NumericalError(std::string("frechet_distance: ") + what + " is not positive semidefinite (eigenvalue " +
                         std::to_string(lambda.minCoeff()) + ")");
  return lambda.cwiseMax(0.0);
}

}  // namespace

double frechet_distance(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& sigma1,
                        const Eigen::VectorXd& mu2, const Eigen::MatrixXd& sigma2) {
  const auto d = mu1.size();
  if (mu2.size() != d || sigma1.rows() != d || sigma1.cols() != d || sigma2.rows() != d || sigma2.cols() != d)
    throw ValidationError("frechet_distance: dimension mismatch");
  const Eigen::MatrixXd jitter = 1e-12 * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd s1 = symmetrize(sigma1) + jitter;
  const Eigen::MatrixXd s2 = symmetrize(sigma2) + jitter;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(s1);
  const Eigen::VectorXd l1 = checked_eigenvalues(es1, "first covariance");
  checked_eigenvalues(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s2, Eigen::EigenvaluesOnly), "second covariance");
  const Eigen::MatrixXd root1 = es1.eigenvectors() * l1.cwiseSqrt().asDiagonal() * es1.eigenvectors().transpose();
  // Tr((S1 S2)^1/2) = Tr((S1^1/2 S2 S1^1/2)^1/2), the latter symmetric.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(root1 * s2 * root1), Eigen::EigenvaluesOnly);
  const double tr_root = checked_eigenvalues(es, "covariance product").cwiseSqrt().sum();
  const double value = (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * tr_root;
  if (value < -1e-6) throw NumericalError("frechet_distance: negative distance " + std::to_string(value));
  return std::max(0.0, value);
}

ERDSuite train_erd_suite(const std::vector<torch::Tensor>& real, int frames, const ERDConfig& cfg) {
  ERDSuite suite;
  for (int base : {16, 32, 64}) {
    const int len = std::max(2, static_cast<int>(std::lround(base * frames / 64.0)));
    ERDConfig c = cfg;
    c.seed = cfg.seed + static_cast<uint64_t>(base);
    suite.models.push_back(train_erd(real, len, c));
  }
  for (int len : {2, 4, 8, 16, 32, 64})
    if (len <= frames) suite.clip_lengths.push_back(len);
  return suite;
}

FIDReport motion_fid(const std::vector<torch::Tensor>& real, const std::vector<torch::Tensor>& generated,
                     ERDSuite& suite) {
  if (real.size() < 2 || generated.size() < 2)
    throw ValidationError("motion_fid: need at least 2 motions on each side");
  FIDReport report;
  double sum_short = 0, sum_mid = 0, sum_long = 0, sum_all = 0;
  int n_short = 0, n_mid = 0, n_long = 0;
  for (int len : suite.clip_lengths) {
    auto real_clips = extract_clips(real, len);
    auto gen_clips = extract_clips(generated, len);
    if (real_clips.size(0) < 2 || gen_clips.size(0) < 2)
      throw ValidationError("motion_fid: fewer than 2 clips of length " + std::to_string(len));
    for (auto& model : suite.models) {
      if (len > model->clip_length()) continue;
      const auto a = fit_gaussian(erd_features(model, real_clips));
      const auto b = fit_gaussian(erd_features(model, gen_clips));
      const double v = frechet_distance(a.mean, a.cov, b.mean, b.cov);
      report.cells.push_back({static_cast<int>(model->clip_length()), len, v});
      sum_all += v;
      if (len <= 4) {
        sum_short += v;
        ++n_short;
      } else if (len <= 16) {
        sum_mid += v;
        ++n_mid;
      } else {
        sum_long += v;
        ++n_long;
      }
    }
  }
  if (report.cells.empty()) throw ValidationError("motion_fid: no valid (model, clip length) pairs");
  if (n_short) report.short_term = sum_short / n_short;
  if (n_mid) report.mid_term = sum_mid / n_mid;
  if (n_long) report.long_term = sum_long / n_long;
  report.average = sum_all / static_cast<double>(report.cells.size());
  return report;
}

std::vector<torch::Tensor> white_noise_motions(const std::vector<torch::Tensor>& reference, int count,
                                               uint64_t seed) {
  if (reference.empty()) throw ValidationError("white_noise_motions: empty reference set");
  auto all = torch::stack(reference).to(torch::kFloat64);  // (N, 3, J, T)
  auto mean = all.mean({0, 2, 3}).view({3, 1, 1});
  auto std = all.std({0, 2, 3}).view({3, 1, 1});
  auto gen = make_generator(seed);
  std::vector<torch::Tensor> out;
  const auto shape = reference[0].sizes();
  for (int i = 0; i < count; ++i)
    out.push_back((mean + std * torch::randn(shape, gen, torch::kFloat64)).to(torch::kFloat32));
  return out;
}

double non_collision_ratio(const std::vector<torch::Tensor>& motions, const SkeletonGraph& graph,
                           const PointGrid& grid, double r, int64_t t) {
  if (motions.empty()) throw ValidationError("non_collision_ratio: empty motion set");
  if (!(r > 0.0)) throw ValidationError("non_collision_ratio: radius must be positive");
  if (t < 0) throw ValidationError("non_collision_ratio: threshold must be >= 0");
  int64_t ok = 0;
  for (const auto& m : motions)
    if (motion_collision_count(m, graph, r, grid) <= t) ++ok;
  return static_cast<double>(ok) / static_cast<double>(motions.size());
}

CollisionReport collision_report(const std::vector<torch::Tensor>& motions,
                                 const std::vector<const PointGrid*>& grids, const SkeletonGraph& graph) {
  if (motions.empty()) throw ValidationError("collision_report: empty motion set");
  if (grids.size() != motions.size()) throw ValidationError("collision_report: one grid per motion required");
  CollisionReport rep;
  const size_t nr = rep.radii_mm.size(), nt = rep.thresholds.size();
  rep.ratios.assign(nr, std::vector<double>(nt, 0.0));
  for (size_t i = 0; i < nr; ++i) {
    std::vector<int64_t> counts;
    for (size_t m = 0; m < motions.size(); ++m)
      counts.push_back(motion_collision_count(motions[m], graph, rep.radii_mm[i] / 1000.0, *grids[m]));
    for (size_t k = 0; k < nt; ++k) {
      const auto ok = std::count_if(counts.begin(), counts.end(), [&](int64_t c) { return c <= rep.thresholds[k]; });
      rep.ratios[i][k] = static_cast<double>(ok) / static_cast<double>(motions.size());
    }
  }
  double total = 0.0;
  for (size_t i = 0; i < nr; ++i) {
    double s = 0.0;
    for (size_t k = 0; k < nt; ++k) {
      const double v = rep.ratios[i][k];
      if (v < 0.0 || v > 1.0) throw std::logic_error("collision_report: ratio outside [0, 1]");
      if (k > 0 && v < rep.ratios[i][k - 1])
        throw std::logic_error("collision_report: ratio decreases with the threshold");
      if (i > 0 && v > rep.ratios[i - 1][k])
        throw std::logic_error("collision_report: ratio increases with the radius");
      s += v;
    }
    rep.per_radius.push_back(s / nt);
    total += s;
  }
  rep.average = total / static_cast<double>(nr * nt);
  return rep;
}

std::vector<double> trajectory_std_curve(const torch::Tensor& trajectories,
                                         std::optional<double> endpoint_tolerance) {
  if (trajectories.dim() != 3 || trajectories.size(2) != 3)
    throw ValidationError("trajectory_std_curve: trajectories must be (N, T, 3)");
  auto x = trajectories.to(torch::kFloat64);
  if (x.size(0) < 2) throw ValidationError("trajectory_std_curve: need at least 2 samples");
  if (endpoint_tolerance) {
    auto ends = x.select(1, x.size(1) - 1);  // (N, 3)
    auto dist = torch::cdist(ends, ends);
    const int64_t medoid = dist.sum(1).argmin().item<int64_t>();
    auto keep = (dist[medoid] <= *endpoint_tolerance).nonzero().squeeze(1);
    if (keep.size(0) < 2)
      throw ValidationError("trajectory_std_curve: endpoint filter leaves fewer than 2 samples");
    x = x.index_select(0, keep);
  }
  auto sd = x.std(0, /*unbiased=*/false);  // (T, 3)
  auto curve = 0.5 * (sd.select(1, 0) + sd.select(1, 2));
  return std::vector<double>(curve.data_ptr<double>(), curve.data_ptr<double>() + curve.numel());
}

nlohmann::json to_json(const FIDReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"model_length", c.model_length}, {"clip_length", c.clip_length}, {"fid", c.value}});
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"cells", cells},
          {"short", opt(r.short_term)},
          {"mid", opt(r.mid_term)},
          {"long", opt(r.long_term)},
          {"average", r.average}};
}

nlohmann::json to_json(const CollisionReport& r) {
  return {{"radii_mm", r.radii_mm},
          {"thresholds", r.thresholds},
          {"ratios", r.ratios},
          {"per_radius", r.per_radius},
          {"average", r.average}};
}

}  // namespace scenemotion
