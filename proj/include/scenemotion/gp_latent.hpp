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

#include <vector>

namespace scenemotion {

struct GPLatentConfig {
  int channels = 1;
  int length = 1;
  /// One length-scale per channel.
  std::vector<double> sigmas;
  double jitter = 1e-6;

  /// Geometric ladder of sigmas from 0.5 to 8.0 across the channels.
  static GPLatentConfig with_ladder(int channels, int length);
  void validate() const;
};

/// Temporally correlated latent codes, (channels, length) or (B, channels, length).
struct LatentSequence {
  torch::Tensor z;
};

/// Sigma_ij = exp(-|i - j| / (2 sigma^2)), double precision.
torch::Tensor build_gp_covariance(int length, double sigma);

/// Caches one Cholesky factor per channel so repeated draws only cost a
/// batched triangular product.
class GPLatentSampler {
 public:
  explicit GPLatentSampler(GPLatentConfig cfg);

  const GPLatentConfig& config() const { return cfg_; }
  /// Lower-triangular factors, (channels, length, length).
  const torch::Tensor& factors() const { return factors_; }
  /// Jitter that was finally needed per channel.
  const std::vector<double>& jitter_used() const { return jitter_used_; }

  /// (batch, channels, length) draws in double precision.
  torch::Tensor sample(int64_t batch, at::Generator& gen) const;

 private:
  GPLatentConfig cfg_;
  torch::Tensor factors_;
  std::vector<double> jitter_used_;
};

LatentSequence sample_latent(const GPLatentConfig& cfg, at::Generator& gen);

/// Seeded CPU generator; all randomness in the library flows through these.
at::Generator make_generator(uint64_t seed);

}  // namespace scenemotion
