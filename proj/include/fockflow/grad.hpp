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

#include <span>
#include <vector>

#include "fockflow/evolve.hpp"
#include "fockflow/fock_state.hpp"
#include "fockflow/params.hpp"

namespace fockflow {

/// d psi_out / d xi for every entry of a ParamGradients, in the same order.
/// Each tensor has the shape of the state.
struct StateGradient {
  std::vector<ParamId> ids;
  std::vector<FockState> dpsi;

  const FockState& at(ParamId id) const;
};

/// dL/d psi* of a real loss, shaped like the state it refers to.
struct UpstreamCotangent {
  FockState dl_dpsi_conj;

  /// dL/d psi, which for a real loss is the conjugate of dL/d psi*.
  FockState dl_dpsi() const;
};

/// dL/d xi* for complex gamma, dL/d xi for real parameters.
struct ParamCotangent {
  ParamId id;
  Complex value;
};

struct KerrBackward {
  std::vector<double> dl_dkappa;
  UpstreamCotangent downstream;
};

/// Differentiated single-mode recurrences. R must be the workspace that
/// evolve_single produced for the same (cms, psi).
StateGradient d_evolve_single(const CMuSigma& cms, const ParamGradients& dcms,
                              const FockState& psi, const RTensor& R);

/// Two-mode counterpart of d_evolve_single.
StateGradient d_evolve_two(const CMuSigma& cms, const ParamGradients& dcms, const FockState& psi,
                           const RTensor& R);

StateGradient d_evolve(const CMuSigma& cms, const ParamGradients& dcms, const FockState& psi,
                       const RTensor& R);

/// dL/d psi_in* = G^dagger (dL/d psi_out*); the output depends
/// holomorphically on the input so there is no second term.
UpstreamCotangent backprop_to_input(const CMuSigma& cms, const UpstreamCotangent& upstream,
                                    int cutoff, int modes,
                                    std::size_t max_entries = kDefaultMaxGEntries);
UpstreamCotangent backprop_to_input(const GTensor& g, const UpstreamCotangent& upstream);

/// Backward rule of apply_kerr(kappa, psi_in).
KerrBackward kerr_gradients(std::span<const double> kappa, const FockState& psi_in,
                            const UpstreamCotangent& upstream);

/// Chain rule into every parameter of gaussian_parameter_ids(modes).
/// Throws NumericalError if a real parameter picks up an imaginary part.
std::vector<ParamCotangent> wirtinger_pair(const UpstreamCotangent& upstream,
                                           const StateGradient& grads);

}  // namespace fockflow
