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

#include <stdexcept>
#include <string>

namespace scenemotion {

/// Bad input to an operation: shape mismatch, non-finite values, broken invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid configuration values (non-positive sigma, degenerate room, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Factorization failure, NaN losses, non-finite gradients.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataErrorCode {
  kIo,
  kMagicMismatch,
  kTruncated,
  kChecksumMismatch,
  kMalformed,
};

/// Dataset, tensor-container and checkpoint failures. Each failure mode has
/// its own code so callers (and tests) can tell them apart.
class DataError : public std::runtime_error {
 public:
  DataError(DataErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  DataErrorCode code() const noexcept { return code_; }

 private:
  DataErrorCode code_;
};

}  // namespace scenemotion
