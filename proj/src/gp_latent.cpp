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

#include "scenemotion/gp_latent.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cmath>
#include <string>

#include "scenemotion/error.hpp"

namespace scenemotion {

GPLatentConfig GPLatentConfig::with_ladder(int channels, int length) {
  GPLatentConfig cfg;
  cfg.channels = channels;
  cfg.length = length;
  cfg.sigmas.resize(std::max(channels, 0));
  for (int c = 0; c < channels; ++c) {
    const double frac = channels > 1 ? static_cast<double>(c) / (channels - 1) : 0.0;
    cfg.sigmas[c] = 0.5 * std::pow(16.0, frac);
  }
  return cfg;
}

void GPLatentConfig::validate() const {
  if (channels < 1) throw ConfigError("gp latent: channels must be >= 1");
  if (length < 1) throw ConfigError("gp latent: length must be >= 1");
  if (static_cast<int>(sigmas.size()) != channels)
    throw ConfigError("gp latent: need exactly one sigma per channel");
  for (double s : sigmas) {
    if (!(s > 0.0)) throw ConfigError("gp latent: sigma must be positive");
  }
  if (!(jitter > 0.0)) throw ConfigError("gp latent: jitter must be positive");
}

torch::Tensor build_gp_covariance(int length, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gp covariance: sigma must be positive");
  if (length < 1) throw ConfigError("gp covariance: length must be >= 1");
  auto t = torch::arange(length, torch::kDouble);
  auto gap = (t.unsqueeze(1) - t.unsqueeze(0)).abs();
  return torch::exp(-gap / (2.0 * sigma * sigma));
}

GPLatentSampler::GPLatentSampler(GPLatentConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const int n = cfg_.length;
  factors_ = torch::zeros({cfg_.channels, n, n}, torch::kDouble);
  auto eye = torch::eye(n, torch::kDouble);
  for (int c = 0; c < cfg_.channels; ++c) {
    auto cov = build_gp_covariance(n, cfg_.sigmas[c]);
    bool ok = false;
    for (double jitter = cfg_.jitter; jitter <= 1e-3 * (1 + 1e-9); jitter *= 10.0) {
      auto [factor, info] = torch::linalg_cholesky_ex(cov + jitter * eye);
      if (info.item<int64_t>() == 0) {
        factors_[c].copy_(factor);
        jitter_used_.push_back(jitter);
        ok = true;
        break;
      }
    }
    if (!ok)
      throw NumericalError("gp latent: covariance for channel " + std::to_string(c) +
                           " is not positive definite even with jitter 1e-3");
  }
}

torch::Tensor GPLatentSampler::sample(int64_t batch, at::Generator& gen) const {
  auto eps = torch::randn({batch, cfg_.channels, cfg_.length}, gen, torch::kDouble);
  // z[b, c, t] = sum_k L[c, t, k] eps[b, c, k]
  return torch::einsum("ctk,bck->bct", {factors_, eps});
}

LatentSequence sample_latent(const GPLatentConfig& cfg, at::Generator& gen) {
  GPLatentSampler sampler(cfg);
  return {sampler.sample(1, gen).squeeze(0)};
}

at::Generator make_generator(uint64_t seed) {
  return at::make_generator<at::CPUGeneratorImpl>(seed);
}

}  // namespace scenemotion
