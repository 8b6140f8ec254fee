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
#include <cstdint>
#include <limits>
#include <vector>

#include "fockflow/fock_state.hpp"
#include "fockflow/params.hpp"

namespace fockflow {

/// Work tallies of one evolution call. Complex multiply-accumulates are
/// counted in scalar_fmas; entries of the R workspace (or of the full
/// transformation tensor) in elements_computed.
struct OpCounter {
  std::int64_t elements_computed = 0;
  std::int64_t scalar_fmas = 0;
};

/**
 * Recurrence workspace R, retained by the forward pass for the gradient pass.
 *
 * One mode: R(m, k) = <G_m| a^k |psi>, stored densely N x N; only k < N - m
 * is ever written.
 *
 * Two modes: R(m, n, j, k) = <G_{m,n}| a^j b^k |psi>, stored densely N^4.
 * Written entries are j + k < N - m for m >= 1, and j + k <= 2N - 2 - n on
 * the m = 0 slab, which feeds both the n- and the m-recurrence.
 *
 * The first row (one mode) or block (two modes) of the transformation is
 * kept in g_seed.
 */
class RTensor {
 public:
  RTensor() = default;
  RTensor(int modes, int cutoff);

  int modes() const { return modes_; }
  int cutoff() const { return cutoff_; }

  const Complex& operator()(int m, int k) const { return values_[index(m, k)]; }
  const Complex& operator()(int m, int n, int j, int k) const { return values_[index(m, n, j, k)]; }

  std::size_t index(int m, int k) const { return static_cast<std::size_t>(m) * cutoff_ + k; }
  std::size_t index(int m, int n, int j, int k) const {
    const std::size_t N = static_cast<std::size_t>(cutoff_);
    return ((static_cast<std::size_t>(m) * N + n) * N + j) * N + k;
  }

  /// Whether the recurrence is allowed to write this entry.
  bool in_range(int m, int k) const;
  bool in_range(int m, int n, int j, int k) const;

  /// Closed-form number of entries inside the declared ranges.
  static std::int64_t entry_count(int modes, int cutoff);

  std::vector<Complex>& values() { return values_; }
  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& g_seed() { return g_seed_; }
  const std::vector<Complex>& g_seed() const { return g_seed_; }

 private:
  int modes_ = 0;
  int cutoff_ = 0;
  std::vector<Complex> values_;
  std::vector<Complex> g_seed_;
};

struct Evolution {
  FockState state;
  RTensor workspace;
};

/// Dense transformation tensor of rank 2M, output indices first, row-major.
struct GTensor {
  int modes = 0;
  int cutoff = 0;
  std::vector<Complex> data;

  /// N^M: number of rows (and columns) of the matrix view.
  std::size_t dim() const;
  const Complex& operator()(std::size_t out, std::size_t in) const { return data[out * dim() + in]; }
};

class MemoryBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMaxGEntries = std::size_t{1} << 26;

/// G_{0,n} for n < N, seeded with G_{0,0} = C.
std::vector<Complex> g_first_row(const CMuSigma& cms, int cutoff);

Evolution evolve_single(const CMuSigma& cms, const FockState& psi, OpCounter* counter = nullptr);

Evolution evolve_two(const CMuSigma& cms, const FockState& psi, OpCounter* counter = nullptr);

/// Dispatches on psi.modes().
Evolution evolve(const CMuSigma& cms, const FockState& psi, OpCounter* counter = nullptr);

/// Large-squeezing approximation: O(N) after the first row, amplitudes
/// are not renormalized.
FockState evolve_single_large_r(const GaussianParams& p, const FockState& psi);

/// Full transformation via the general multi-index recurrence. Throws
/// MemoryBudgetError if N^{2M} exceeds max_entries.
GTensor full_g_tensor(const CMuSigma& cms, int cutoff, int modes,
                      std::size_t max_entries = kDefaultMaxGEntries, OpCounter* counter = nullptr);

/// Dense matrix-vector product G psi.
FockState contract(const GTensor& g, const FockState& psi, OpCounter* counter = nullptr);

/// Multiplies amp[k] by exp(i sum_i kappa_i k_i^2).
FockState apply_kerr(std::span<const double> kappa, const FockState& psi);

}  // namespace fockflow
