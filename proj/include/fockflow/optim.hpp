// Copyright 2026 The Fockflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fockflow/circuit.hpp"

namespace fockflow {

enum class Algorithm { PlainSgd, AdaptiveMoments };

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::AdaptiveMoments;
  double learning_rate = 0.01;
  int steps = 1000;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_hat = 1e-8;
  /// Parameters are drawn uniformly from [-init_scale, init_scale];
  /// squeezing magnitudes from [0, init_scale].
  double init_scale = 0.05;
  /// Stop once the loss drops below this value. Off by default.
  std::optional<double> loss_floor;
  LossOptions loss;
  int threads = 1;

  void validate() const;
};

/// Moment estimates, one (Re, Im) pair per coordinate.
struct AdamState {
  std::vector<Complex> first;
  std::vector<Complex> second;
  std::int64_t step = 0;
};

/// Raised when training hits a non-finite loss or gradient.
class TrainingAborted : public NumericalError {
 public:
  TrainingAborted(int step, const std::string& what);
  int step() const { return step_; }

 private:
  int step_;
};

struct TrainReport {
  std::vector<double> loss_trace;
  std::vector<double> fidelities;
  std::vector<double> normalized_fidelities;
  double final_loss = 0.0;
  double wall_seconds = 0.0;
  ParameterVector parameters;
  /// How many times an update pushed a squeezing magnitude below zero.
  std::int64_t clamp_count = 0;
};

/// xi <- xi - lr * grad, with grad = dL/dxi* for complex coordinates.
/// Returns the number of magnitudes clamped back to zero.
std::int64_t sgd_step(ParameterVector& params, std::span<const Complex> grads, double lr);

/// Adaptive-moment step on the real and imaginary components separately.
std::int64_t adam_step(ParameterVector& params, std::span<const Complex> grads, AdamState& state,
                       const OptimizerConfig& cfg);

/// Draws every coordinate uniformly from the configured range.
ParameterVector random_initialization(const Circuit& c, const OptimizerConfig& cfg);

/// Trains c in place, starting from random_initialization(c, cfg).
TrainReport train(Circuit& c, const TrainingSet& ts, const OptimizerConfig& cfg);

}  // namespace fockflow
