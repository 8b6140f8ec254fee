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

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fockflow {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Raised when an operation produces or receives non-finite numbers.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Pure state in the truncated photon-number basis of one or two modes.
 *
 * Amplitudes are stored row-major: amp(k) for one mode, amp(m, n) at
 * index m * cutoff + n for two modes.
 */
class FockState {
 public:
  FockState() = default;
  FockState(int modes, int cutoff);

  static FockState vacuum(int modes, int cutoff);
  /// Single number state |k> (one mode) or |k1, k2> (two modes).
  static FockState number(int cutoff, std::span<const int> photons);
  static FockState number(int cutoff, int k) { return number(cutoff, std::span<const int>(&k, 1)); }
  static FockState number(int cutoff, int k1, int k2) {
    const int ks[2] = {k1, k2};
    return number(cutoff, ks);
  }

  int modes() const { return modes_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return amp_.size(); }

  Complex& operator[](std::size_t i) { return amp_[i]; }
  const Complex& operator[](std::size_t i) const { return amp_[i]; }
  Complex& operator()(int m, int n) { return amp_[static_cast<std::size_t>(m) * cutoff_ + n]; }
  const Complex& operator()(int m, int n) const {
    return amp_[static_cast<std::size_t>(m) * cutoff_ + n];
  }

  std::span<Complex> amplitudes() { return amp_; }
  std::span<const Complex> amplitudes() const { return amp_; }

  double norm_squared() const;
  bool same_shape(const FockState& other) const {
    return modes_ == other.modes_ && cutoff_ == other.cutoff_;
  }

 private:
  int modes_ = 0;
  int cutoff_ = 0;
  std::vector<Complex> amp_;
};

/// <a|b> = sum_k conj(a_k) b_k.
Complex inner(const FockState& a, const FockState& b);

/// |<a|b>| / (||a|| ||b||); insensitive to global phase and norm.
double normalized_overlap(const FockState& a, const FockState& b);

/// Throws std::invalid_argument unless the shapes match.
void require_same_shape(const FockState& a, const FockState& b, const char* what);

}  // namespace fockflow
