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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fockflow/evolve.hpp"
#include "fockflow/fock_state.hpp"
#include "fockflow/params.hpp"

namespace fockflow {

/// Within one layer, which gate touches the state first.
enum class LayerOrder { GaussianFirst, KerrFirst };

struct Layer {
  GaussianParams gauss;
  std::vector<double> kappa;
};

/// How a flat coordinate is updated by the optimizers.
enum class CoordKind {
  Complex,    // updated with dL/dxi*
  Real,       // updated with dL/dxi
  Magnitude,  // real, clamped to >= 0 after every step
};

/// Flat view of every circuit parameter. Real coordinates keep a zero
/// imaginary part.
struct ParameterVector {
  std::vector<Complex> values;
  std::vector<CoordKind> kinds;

  std::size_t size() const { return values.size(); }
};

class Circuit {
 public:
  Circuit(int modes, int cutoff, std::vector<Layer> layers,
          LayerOrder order = LayerOrder::GaussianFirst);

  /// L identity layers.
  static Circuit identity(int modes, int cutoff, int layers,
                          LayerOrder order = LayerOrder::GaussianFirst);

  int modes() const { return modes_; }
  int cutoff() const { return cutoff_; }
  LayerOrder order() const { return order_; }
  const std::vector<Layer>& layers() const { return layers_; }
  Layer& layer(std::size_t i) { return layers_.at(i); }

  /// Per layer: gaussian_parameter_ids(M) order, then kappa_1..kappa_M.
  std::size_t parameters_per_layer() const;
  ParameterVector parameters() const;
  void set_parameters(const ParameterVector& p);

  void validate() const;

 private:
  int modes_;
  int cutoff_;
  std::vector<Layer> layers_;
  LayerOrder order_;
};

struct TrainingPair {
  FockState input;
  FockState target;
};

struct TrainingSet {
  std::vector<TrainingPair> pairs;

  /// Throws std::invalid_argument on an empty set, mixed shapes, or targets
  /// that are not normalized to 1e-12.
  void validate(int modes, int cutoff) const;
};

/// Everything one layer keeps for the backward pass.
struct LayerTrace {
  CMuSigma cms;
  FockState gauss_input;
  Evolution gauss;  // output state and R workspace
  FockState kerr_input;
};

struct ForwardPass {
  FockState output;
  std::vector<LayerTrace> layers;
  std::vector<Complex> parameter_snapshot;
};

/// Layer 1 acts first on the input state.
ForwardPass forward(const Circuit& c, const FockState& psi);

/// 1 - (1/S) sum_s |<target_s| U |in_s>|^2, with the unnormalized output.
double loss_fidelity(const Circuit& c, const TrainingSet& ts);

class DivergentLossError : public std::runtime_error {
 public:
  DivergentLossError(std::size_t pair, double probability);
  std::size_t pair() const { return pair_; }

 private:
  std::size_t pair_;
};

inline constexpr double kKlProbabilityFloor = 1e-30;

/// -sum_s log |<target_s| U |in_s>|^2. Throws DivergentLossError when a pair
/// probability is at or below kKlProbabilityFloor.
double loss_kl_uniform(const Circuit& c, const TrainingSet& ts);

struct LossOptions {
  double kl_weight = 0.0;
};

/// Gradient aligned with Circuit::parameters(): dL/dxi* for complex
/// coordinates, dL/dxi (imaginary part zero) for real ones. Throws
/// std::invalid_argument if the passes were not produced from the current
/// parameters of c.
std::vector<Complex> backward(const Circuit& c, const TrainingSet& ts,
                              std::span<const ForwardPass> passes, LossOptions options = {});

struct Evaluation {
  double loss = 0.0;
  double fidelity_loss = 0.0;
  double kl = 0.0;
  std::vector<double> fidelities;             // |<t|out>|^2
  std::vector<double> normalized_fidelities;  // |<t|out>|^2 / ||out||^2
  std::vector<Complex> gradient;
};

/// Forward and backward over every pair; pairs are spread over up to
/// `threads` workers and reduced in pair order.
Evaluation evaluate(const Circuit& c, const TrainingSet& ts, LossOptions options = {},
                    int threads = 1);

/// Thread cap from FOCKFLOW_THREADS (default 1).
int threads_from_env();

}  // namespace fockflow
