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

#include "fockflow/evolve.hpp"

#include <cmath>
#include <string>

#include "recurrence.hpp"

namespace fockflow {

RTensor::RTensor(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
  if (modes < 1 || modes > 2) throw std::invalid_argument("RTensor: modes must be 1 or 2");
  if (cutoff < 1) throw std::invalid_argument("RTensor: cutoff must be positive");
  const std::size_t N = static_cast<std::size_t>(cutoff);
  values_.assign(modes == 1 ? N * N : N * N * N * N, Complex{});
  g_seed_.assign(modes == 1 ? N : N * N, Complex{});
}

bool RTensor::in_range(int m, int k) const {
  return m >= 0 && k >= 0 && m < cutoff_ && k < cutoff_ - m;
}

bool RTensor::in_range(int m, int n, int j, int k) const {
  const int N = cutoff_;
  if (m < 0 || n < 0 || j < 0 || k < 0 || m >= N || n >= N || j >= N || k >= N) return false;
  if (m == 0) return j + k <= 2 * N - 2 - n;
  return j + k < N - m;
}

std::int64_t RTensor::entry_count(int modes, int cutoff) {
  const std::int64_t N = cutoff;
  if (modes == 1) return N * (N + 1) / 2;
  // m = 0 slab: N^3 minus the corner j + k > 2N - 2 - n; m >= 1: N * sum t(t+1)/2.
  return N * N * N + N * (N + 1) * (N - 1) * (N - 1) / 6;
}

std::size_t GTensor::dim() const {
  std::size_t d = 1;
  for (int i = 0; i < modes; ++i) d *= static_cast<std::size_t>(cutoff);
  return d;
}

std::vector<Complex> g_first_row(const CMuSigma& cms, int cutoff) {
  if (cms.modes() != 1) throw std::invalid_argument("g_first_row: single mode only");
  if (cutoff < 1) throw std::invalid_argument("g_first_row: cutoff must be positive");
  detail::SqrtTable t(cutoff);
  std::vector<Complex> g(cutoff);
  detail::single_first_row<false>(detail::Coeffs(cms), nullptr, nullptr, g.data(), cutoff, t);
  return g;
}

Evolution evolve_single(const CMuSigma& cms, const FockState& psi, OpCounter* counter) {
  if (cms.modes() != 1 || psi.modes() != 1) {
    throw std::invalid_argument("evolve_single: expects single-mode parameters and state");
  }
  const int N = psi.cutoff();
  detail::SqrtTable t(N);
  detail::Coeffs c(cms);
  Evolution out{FockState(1, N), RTensor(1, N)};
  auto& g = out.workspace.g_seed();
  auto& R = out.workspace.values();
  detail::single_first_row<false>(c, nullptr, nullptr, g.data(), N, t);
  detail::single_seed_row(g.data(), psi.amplitudes(), R.data(), N, t, counter);
  detail::single_rows<false>(c, nullptr, nullptr, R.data(), N, t, counter);
  for (int m = 0; m < N; ++m) out.state[m] = R[out.workspace.index(m, 0)];
  return out;
}

Evolution evolve_two(const CMuSigma& cms, const FockState& psi, OpCounter* counter) {
  if (cms.modes() != 2 || psi.modes() != 2) {
    throw std::invalid_argument("evolve_two: expects two-mode parameters and a square state");
  }
  const int N = psi.cutoff();
  detail::SqrtTable t(N);
  detail::Coeffs c(cms);
  Evolution out{FockState(2, N), RTensor(2, N)};
  RTensor& R = out.workspace;
  detail::two_seed_block<false>(c, nullptr, nullptr, R.g_seed().data(), N, t);
  detail::two_seed_dots(R.g_seed().data(), psi.amplitudes(), R, R.values().data(), t, counter);
  detail::two_rows<false>(c, nullptr, nullptr, R, R.values().data(), t, counter);
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) out.state(m, n) = R(m, n, 0, 0);
  }
  return out;
}

Evolution evolve(const CMuSigma& cms, const FockState& psi, OpCounter* counter) {
  return psi.modes() == 1 ? evolve_single(cms, psi, counter) : evolve_two(cms, psi, counter);
}

FockState evolve_single_large_r(const GaussianParams& p, const FockState& psi) {
  if (p.modes != 1 || psi.modes() != 1) {
    throw std::invalid_argument("evolve_single_large_r: single mode only");
  }
  const CMuSigma cms = compute_cmusigma_large_r(p);
  const int N = psi.cutoff();
  detail::SqrtTable t(N);
  // With mu_2 = 0 the first-row recurrence collapses to the two-step form.
  std::vector<Complex> g = g_first_row(cms, N);
  FockState out(1, N);
  Complex r0{};
  for (int n = 0; n < N; ++n) r0 += g[n] * psi[n];
  out[0] = r0;
  const Complex mu = cms.mu(0);
  const Complex s11 = cms.Sigma(0, 0);
  for (int m = 1; m < N; ++m) {
    Complex v = mu * out[m - 1];
    if (m >= 2) v -= s11 * t.sq[m - 1] * out[m - 2];
    out[m] = v * t.inv[m];
  }
  return out;
}

GTensor full_g_tensor(const CMuSigma& cms, int cutoff, int modes, std::size_t max_entries,
                      OpCounter* counter) {
  if (modes < 1 || modes > 2 || cms.modes() != modes) {
    throw std::invalid_argument("full_g_tensor: modes must be 1 or 2 and match the parameters");
  }
  if (cutoff < 1) throw std::invalid_argument("full_g_tensor: cutoff must be positive");
  const int rank = 2 * modes;
  double entries = std::pow(static_cast<double>(cutoff), rank);
  if (entries > static_cast<double>(max_entries)) {
    throw MemoryBudgetError("full_g_tensor: " + std::to_string(cutoff) + "^" +
                            std::to_string(rank) + " entries exceed the budget of " +
                            std::to_string(max_entries));
  }
  GTensor g{modes, cutoff, std::vector<Complex>(static_cast<std::size_t>(entries))};
  detail::SqrtTable t(cutoff);
  detail::Coeffs c(cms);

  std::size_t stride[4];
  stride[rank - 1] = 1;
  for (int a = rank - 2; a >= 0; --a) stride[a] = stride[a + 1] * cutoff;

  int idx[4] = {0, 0, 0, 0};
  g.data[0] = c.C;
  for (std::size_t flat = 1; flat < g.data.size(); ++flat) {
    for (int a = rank - 1; a >= 0; --a) {
      if (++idx[a] < cutoff) break;
      idx[a] = 0;
    }
    // Step along the first non-zero axis; every other term then refers to an
    // index that precedes this one in row-major order.
    int i = 0;
    while (idx[i] == 0) ++i;
    const std::size_t prev = flat - stride[i];
    Complex v = g.data[prev] * c.mu[i];
    int terms = 1;
    for (int l = 0; l < rank; ++l) {
      const int kl = idx[l] - (l == i ? 1 : 0);
      if (kl > 0) {
        v -= t.sq[kl] * g.data[prev - stride[l]] * c.S[i][l];
        ++terms;
      }
    }
    g.data[flat] = v * t.inv[idx[i]];
    detail::tally(counter, 1, terms);
  }
  detail::tally(counter, 1, 0);
  return g;
}

FockState contract(const GTensor& g, const FockState& psi, OpCounter* counter) {
  if (g.modes != psi.modes() || g.cutoff != psi.cutoff()) {
    throw std::invalid_argument("contract: tensor and state shapes differ");
  }
  const std::size_t d = g.dim();
  FockState out(psi.modes(), psi.cutoff());
  for (std::size_t row = 0; row < d; ++row) {
    const Complex* gr = g.data.data() + row * d;
    Complex acc{};
    for (std::size_t col = 0; col < d; ++col) acc += gr[col] * psi[col];
    out[row] = acc;
  }
  detail::tally(counter, 0, static_cast<std::int64_t>(d * d));
  return out;
}

FockState apply_kerr(std::span<const double> kappa, const FockState& psi) {
  if (kappa.size() != static_cast<std::size_t>(psi.modes())) {
    throw std::invalid_argument("apply_kerr: one strength per mode required");
  }
  FockState out = psi;
  const int N = psi.cutoff();
  if (psi.modes() == 1) {
    for (int k = 0; k < N; ++k) out[k] *= std::exp(kI * (kappa[0] * k * k));
  } else {
    for (int m = 0; m < N; ++m) {
      for (int n = 0; n < N; ++n) {
        out(m, n) *= std::exp(kI * (kappa[0] * m * m + kappa[1] * n * n));
      }
    }
  }
  return out;
}

}  // namespace fockflow
