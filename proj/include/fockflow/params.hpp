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

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fockflow/fock_state.hpp"

namespace fockflow {

// Matrices here are at most 4x4 (two modes, output and input halves).
using SmallMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using SmallVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, 4, 1>;

struct BeamsplitterAngles {
  double theta = 0.0;
  double varphi = 0.0;
};

/**
 * Physical parameters of the gate sequence D(gamma) R(phi) S(r, delta) on
 * one mode, or D(gamma) R(phi) B(post) S(r, delta) B(pre) on two modes.
 * The beamsplitters are present iff modes == 2.
 */
struct GaussianParams {
  int modes = 1;
  std::vector<Complex> gamma;
  std::vector<double> r;
  std::vector<double> delta;
  std::vector<double> phi;
  std::optional<BeamsplitterAngles> bs_pre;
  std::optional<BeamsplitterAngles> bs_post;

  static GaussianParams identity(int modes);
  /// Throws std::invalid_argument on inconsistent sizes or r < 0,
  /// NumericalError on non-finite entries.
  void validate() const;
};

struct Interferometers {
  SmallMatrix W;
  SmallMatrix V;
};

/// Scalar, vector and matrix driving the photon-number recurrences.
struct CMuSigma {
  Complex C{1.0, 0.0};
  SmallVector mu;
  SmallMatrix Sigma;

  int modes() const { return static_cast<int>(mu.size()) / 2; }
};

enum class ParamKind {
  Gamma,      // d/d gamma_i, with gamma* held fixed
  GammaConj,  // d/d gamma_i*
  R,
  Delta,
  Phi,
  BsPreTheta,
  BsPreVarphi,
  BsPostTheta,
  BsPostVarphi,
};

struct ParamId {
  ParamKind kind;
  int mode = 0;  // unused for beamsplitter angles

  friend bool operator==(const ParamId&, const ParamId&) = default;
};

const char* to_string(ParamKind kind);

/// Ordered real-or-complex coordinates of a GaussianParams. Complex gamma
/// appears once, as ParamKind::Gamma; its conjugate direction is implied.
std::vector<ParamId> gaussian_parameter_ids(int modes);

struct ParamDerivative {
  ParamId id;
  CMuSigma d;  // partials of C, mu, Sigma
};

/// Partials of (C, mu, Sigma) with respect to every parameter. Complex gamma
/// contributes a Wirtinger pair (Gamma and GammaConj); real parameters
/// contribute a single entry.
struct ParamGradients {
  std::vector<ParamDerivative> entries;

  const ParamDerivative& at(ParamId id) const;
};

SmallMatrix beamsplitter_unitary(double theta, double varphi);

Interferometers build_interferometers(const GaussianParams& p);

CMuSigma compute_cmusigma(const GaussianParams& p);

/// sech r -> 0, tanh r -> 1 limit of compute_cmusigma, keeping sqrt(sech r)
/// in C. Single mode only.
CMuSigma compute_cmusigma_large_r(const GaussianParams& p);

ParamGradients compute_param_gradients(const GaussianParams& p);

}  // namespace fockflow
