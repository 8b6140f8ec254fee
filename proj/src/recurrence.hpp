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

// Recurrence kernels shared by the forward pass and the derivative pass.
//
// With Diff = false the kernels fill X from the coefficients c. With
// Diff = true they fill dX = (recurrence on dX with c) + (recurrence on the
// base X with the coefficient partials dc), which is the product rule
// applied to each linear recurrence.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fockflow/evolve.hpp"

namespace fockflow::detail {

struct SqrtTable {
  std::vector<double> sq;   // sqrt(n), n = 0..N
  std::vector<double> inv;  // 1/sqrt(n), inv[0] unused

  explicit SqrtTable(int n) : sq(n + 1), inv(n + 1, 0.0) {
    for (int i = 0; i <= n; ++i) {
      sq[i] = std::sqrt(static_cast<double>(i));
      if (i > 0) inv[i] = 1.0 / sq[i];
    }
  }
};

struct Coeffs {
  Complex C;
  Complex mu[4];
  Complex S[4][4];

  explicit Coeffs(const CMuSigma& cms) : C(cms.C) {
    const int d = static_cast<int>(cms.mu.size());
    for (int i = 0; i < d; ++i) {
      mu[i] = cms.mu(i);
      for (int j = 0; j < d; ++j) S[i][j] = cms.Sigma(i, j);
    }
  }
};

inline void tally(OpCounter* counter, std::int64_t elements, std::int64_t fmas) {
  if (counter) {
    counter->elements_computed += elements;
    counter->scalar_fmas += fmas;
  }
}

// ---------------------------------------------------------------- one mode

// g[n] = G_{0,n}: input-index recurrence with mu_2, Sigma_22.
template <bool Diff>
void single_first_row(const Coeffs& c, const Coeffs* dc, const Complex* base, Complex* g, int N,
                      const SqrtTable& t) {
  g[0] = Diff ? dc->C : c.C;
  for (int n = 1; n < N; ++n) {
    Complex v = c.mu[1] * g[n - 1];
    if constexpr (Diff) v += dc->mu[1] * base[n - 1];
    if (n >= 2) {
      v -= c.S[1][1] * t.sq[n - 1] * g[n - 2];
      if constexpr (Diff) v -= dc->S[1][1] * t.sq[n - 1] * base[n - 2];
    }
    g[n] = v * t.inv[n];
  }
}

// R(0, k) = <G_0| a^k |psi>, each a shrinking dot product against the
// progressively lowered scratch copy of psi.
inline void single_seed_row(const Complex* g, std::span<const Complex> psi, Complex* R, int N,
                            const SqrtTable& t, OpCounter* counter) {
  std::vector<Complex> lowered(psi.begin(), psi.end());
  for (int k = 0; k < N; ++k) {
    const int len = N - k;
    Complex acc{};
    for (int n = 0; n < len; ++n) acc += g[n] * lowered[n];
    R[k] = acc;
    tally(counter, 1, len);
    for (int n = 0; n + 1 < len; ++n) lowered[n] = lowered[n + 1] * t.sq[n + 1];
  }
}

// Rows m >= 1, k < N - m.
template <bool Diff>
void single_rows(const Coeffs& c, const Coeffs* dc, const Complex* base, Complex* R, int N,
                 const SqrtTable& t, OpCounter* counter) {
  for (int m = 1; m < N; ++m) {
    const Complex* prev = R + static_cast<std::size_t>(m - 1) * N;
    const Complex* prev2 = m >= 2 ? R + static_cast<std::size_t>(m - 2) * N : nullptr;
    const Complex* bprev = nullptr;
    const Complex* bprev2 = nullptr;
    if constexpr (Diff) {
      bprev = base + static_cast<std::size_t>(m - 1) * N;
      bprev2 = m >= 2 ? base + static_cast<std::size_t>(m - 2) * N : nullptr;
    }
    Complex* row = R + static_cast<std::size_t>(m) * N;
    const Complex a1 = c.mu[0] * t.inv[m];
    const Complex a2 = c.S[0][0] * (t.sq[m - 1] * t.inv[m]);
    const Complex a3 = c.S[0][1] * t.inv[m];
    Complex b1{}, b2{}, b3{};
    if constexpr (Diff) {
      b1 = dc->mu[0] * t.inv[m];
      b2 = dc->S[0][0] * (t.sq[m - 1] * t.inv[m]);
      b3 = dc->S[0][1] * t.inv[m];
    }
    const int len = N - m;
    for (int k = 0; k < len; ++k) {
      Complex v = a1 * prev[k] - a3 * prev[k + 1];
      if (prev2) v -= a2 * prev2[k];
      if constexpr (Diff) {
        v += b1 * bprev[k] - b3 * bprev[k + 1];
        if (bprev2) v -= b2 * bprev2[k];
      }
      row[k] = v;
    }
    tally(counter, len, static_cast<std::int64_t>(len) * (prev2 ? 3 : 2));
  }
}

// ---------------------------------------------------------------- two modes

// g[p * N + q] = G_{0,0,p,q}.
template <bool Diff>
void two_seed_block(const Coeffs& c, const Coeffs* dc, const Complex* base, Complex* g, int N,
                    const SqrtTable& t) {
  auto at = [N](int p, int q) { return static_cast<std::size_t>(p) * N + q; };
  g[0] = Diff ? dc->C : c.C;
  for (int q = 1; q < N; ++q) {
    Complex v = c.mu[3] * g[at(0, q - 1)];
    if constexpr (Diff) v += dc->mu[3] * base[at(0, q - 1)];
    if (q >= 2) {
      v -= t.sq[q - 1] * c.S[3][3] * g[at(0, q - 2)];
      if constexpr (Diff) v -= t.sq[q - 1] * dc->S[3][3] * base[at(0, q - 2)];
    }
    g[at(0, q)] = v * t.inv[q];
  }
  for (int p = 1; p < N; ++p) {
    for (int q = 0; q < N; ++q) {
      Complex v = c.mu[2] * g[at(p - 1, q)];
      if constexpr (Diff) v += dc->mu[2] * base[at(p - 1, q)];
      if (p >= 2) {
        v -= t.sq[p - 1] * c.S[2][2] * g[at(p - 2, q)];
        if constexpr (Diff) v -= t.sq[p - 1] * dc->S[2][2] * base[at(p - 2, q)];
      }
      if (q >= 1) {
        v -= t.sq[q] * c.S[2][3] * g[at(p - 1, q - 1)];
        if constexpr (Diff) v -= t.sq[q] * dc->S[2][3] * base[at(p - 1, q - 1)];
      }
      g[at(p, q)] = v * t.inv[p];
    }
  }
}

// R(0, 0, j, k) = <G_00| a^j b^k |psi> for all j, k < N.
inline void two_seed_dots(const Complex* g, std::span<const Complex> psi, const RTensor& R,
                          Complex* values, const SqrtTable& t, OpCounter* counter) {
  const int N = R.cutoff();
  const std::size_t NN = static_cast<std::size_t>(N);
  std::vector<Complex> lowered_a(psi.begin(), psi.end());  // a^j psi
  std::vector<Complex> lowered_ab(psi.size());             // a^j b^k psi
  for (int j = 0; j < N; ++j) {
    const int rows = N - j;
    std::copy(lowered_a.begin(), lowered_a.begin() + static_cast<std::ptrdiff_t>(rows * NN),
              lowered_ab.begin());
    for (int k = 0; k < N; ++k) {
      const int cols = N - k;
      Complex acc{};
      for (int p = 0; p < rows; ++p) {
        const Complex* gr = g + p * NN;
        const Complex* sr = lowered_ab.data() + p * NN;
        for (int q = 0; q < cols; ++q) acc += gr[q] * sr[q];
      }
      values[R.index(0, 0, j, k)] = acc;
      tally(counter, 1, static_cast<std::int64_t>(rows) * cols);
      for (int p = 0; p < rows; ++p) {
        Complex* sr = lowered_ab.data() + p * NN;
        for (int q = 0; q + 1 < cols; ++q) sr[q] = sr[q + 1] * t.sq[q + 1];
      }
    }
    for (int p = 0; p + 1 < rows; ++p) {
      for (std::size_t q = 0; q < NN; ++q) {
        lowered_a[p * NN + q] = lowered_a[(p + 1) * NN + q] * t.sq[p + 1];
      }
    }
  }
}

// Remaining entries: the n-recurrence on the m = 0 slab, then the
// m-recurrence for m >= 1.
template <bool Diff>
void two_rows(const Coeffs& c, const Coeffs* dc, const Complex* base, const RTensor& R,
              Complex* X, const SqrtTable& t, OpCounter* counter) {
  const int N = R.cutoff();
  // Strides of the flat (m, n, j, k) layout.
  const std::size_t sk = 1, sj = N, sn = sj * N, sm = sn * N;

  for (int n = 1; n < N; ++n) {
    const Complex a1 = c.mu[1] * t.inv[n];
    const Complex a2 = c.S[1][1] * (t.sq[n - 1] * t.inv[n]);
    const Complex a3 = c.S[1][2] * t.inv[n];
    const Complex a4 = c.S[1][3] * t.inv[n];
    Complex b1{}, b2{}, b3{}, b4{};
    if constexpr (Diff) {
      b1 = dc->mu[1] * t.inv[n];
      b2 = dc->S[1][1] * (t.sq[n - 1] * t.inv[n]);
      b3 = dc->S[1][2] * t.inv[n];
      b4 = dc->S[1][3] * t.inv[n];
    }
    for (int j = 0; j < N; ++j) {
      const int kend = std::min(N - 1, 2 * N - 2 - n - j);
      for (int k = 0; k <= kend; ++k) {
        const std::size_t here = n * sn + j * sj + k * sk;
        const std::size_t up = here - sn;
        int terms = 1;
        Complex v = a1 * X[up];
        if constexpr (Diff) v += b1 * base[up];
        if (n >= 2) {
          v -= a2 * X[up - sn];
          if constexpr (Diff) v -= b2 * base[up - sn];
          ++terms;
        }
        if (j + 1 < N) {
          v -= a3 * X[up + sj];
          if constexpr (Diff) v -= b3 * base[up + sj];
          ++terms;
        }
        if (k + 1 < N) {
          v -= a4 * X[up + sk];
          if constexpr (Diff) v -= b4 * base[up + sk];
          ++terms;
        }
        X[here] = v;
        tally(counter, 1, terms);
      }
    }
  }

  for (int m = 1; m < N; ++m) {
    const Complex a1 = c.mu[0] * t.inv[m];
    const Complex a2 = c.S[0][0] * (t.sq[m - 1] * t.inv[m]);
    const Complex a4 = c.S[0][2] * t.inv[m];
    const Complex a5 = c.S[0][3] * t.inv[m];
    Complex b1{}, b2{}, b4{}, b5{};
    if constexpr (Diff) {
      b1 = dc->mu[0] * t.inv[m];
      b2 = dc->S[0][0] * (t.sq[m - 1] * t.inv[m]);
      b4 = dc->S[0][2] * t.inv[m];
      b5 = dc->S[0][3] * t.inv[m];
    }
    for (int n = 0; n < N; ++n) {
      const Complex a3 = c.S[0][1] * (t.sq[n] * t.inv[m]);
      Complex b3{};
      if constexpr (Diff) b3 = dc->S[0][1] * (t.sq[n] * t.inv[m]);
      for (int j = 0; j < N - m; ++j) {
        const int len = N - m - j;
        const std::size_t here0 = m * sm + n * sn + j * sj;
        const std::size_t prev0 = here0 - sm;
        for (int k = 0; k < len; ++k) {
          const std::size_t prev = prev0 + k;
          Complex v = a1 * X[prev] - a4 * X[prev + sj] - a5 * X[prev + sk];
          if constexpr (Diff) v += b1 * base[prev] - b4 * base[prev + sj] - b5 * base[prev + sk];
          if (m >= 2) {
            v -= a2 * X[prev - sm];
            if constexpr (Diff) v -= b2 * base[prev - sm];
          }
          if (n >= 1) {
            v -= a3 * X[prev - sn];
            if constexpr (Diff) v -= b3 * base[prev - sn];
          }
          X[here0 + k] = v;
        }
        tally(counter, len, static_cast<std::int64_t>(len) * (3 + (m >= 2) + (n >= 1)));
      }
    }
  }
}

}  // namespace fockflow::detail
