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

#include "fockflow/fock_state.hpp"

#include <cmath>
#include <string>

namespace fockflow {

FockState::FockState(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
  if (modes < 1 || modes > 2) {
    throw std::invalid_argument("FockState: modes must be 1 or 2, got " + std::to_string(modes));
  }
  if (cutoff < 1) {
    throw std::invalid_argument("FockState: cutoff must be positive, got " + std::to_string(cutoff));
  }
  std::size_t n = static_cast<std::size_t>(cutoff);
  amp_.assign(modes == 1 ? n : n * n, Complex{});
}

FockState FockState::vacuum(int modes, int cutoff) {
  FockState s(modes, cutoff);
  s.amp_[0] = 1.0;
  return s;
}

FockState FockState::number(int cutoff, std::span<const int> photons) {
  FockState s(static_cast<int>(photons.size()), cutoff);
  std::size_t index = 0;
  for (int k : photons) {
    if (k < 0 || k >= cutoff) {
      throw std::invalid_argument("FockState::number: photon number " + std::to_string(k) +
                                  " outside cutoff " + std::to_string(cutoff));
    }
    index = index * cutoff + k;
  }
  s.amp_[index] = 1.0;
  return s;
}

double FockState::norm_squared() const {
  double acc = 0.0;
  for (const Complex& a : amp_) acc += std::norm(a);
  return acc;
}

void require_same_shape(const FockState& a, const FockState& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": state shapes differ");
  }
}

Complex inner(const FockState& a, const FockState& b) {
  require_same_shape(a, b, "inner");
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double normalized_overlap(const FockState& a, const FockState& b) {
  double na = std::sqrt(a.norm_squared());
  double nb = std::sqrt(b.norm_squared());
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(inner(a, b)) / (na * nb);
}

}  // namespace fockflow
