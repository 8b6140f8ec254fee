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

#include "fockflow/grad.hpp"

#include <cmath>
#include <string>

#include "recurrence.hpp"

namespace fockflow {
namespace {

void check_workspace(const FockState& psi, const RTensor& R, int modes, const char* what) {
  if (psi.modes() != modes || R.modes() != modes || R.cutoff() != psi.cutoff()) {
    throw std::invalid_argument(std::string(what) + ": workspace does not match the input state");
  }
}

}  // namespace

const FockState& StateGradient::at(ParamId id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return dpsi[i];
  }
  throw std::out_of_range(std::string("StateGradient: no entry for ") + to_string(id.kind));
}

FockState UpstreamCotangent::dl_dpsi() const {
  FockState out = dl_dpsi_conj;
  for (Complex& z : out.amplitudes()) z = std::conj(z);
  return out;
}

StateGradient d_evolve_single(const CMuSigma& cms, const ParamGradients& dcms,
                              const FockState& psi, const RTensor& R) {
  check_workspace(psi, R, 1, "d_evolve_single");
  const int N = psi.cutoff();
  detail::SqrtTable t(N);
  detail::Coeffs c(cms);
  std::vector<Complex> dg(N);
  std::vector<Complex> dR(static_cast<std::size_t>(N) * N);
  StateGradient out;
  for (const ParamDerivative& entry : dcms.entries) {
    detail::Coeffs dc(entry.d);
    detail::single_first_row<true>(c, &dc, R.g_seed().data(), dg.data(), N, t);
    detail::single_seed_row(dg.data(), psi.amplitudes(), dR.data(), N, t, nullptr);
    detail::single_rows<true>(c, &dc, R.values().data(), dR.data(), N, t, nullptr);
    FockState d(1, N);
    for (int m = 0; m < N; ++m) d[m] = dR[R.index(m, 0)];
    out.ids.push_back(entry.id);
    out.dpsi.push_back(std::move(d));
  }
  return out;
}

StateGradient d_evolve_two(const CMuSigma& cms, const ParamGradients& dcms, const FockState& psi,
                           const RTensor& R) {
  check_workspace(psi, R, 2, "d_evolve_two");
  const int N = psi.cutoff();
  detail::SqrtTable t(N);
  detail::Coeffs c(cms);
  std::vector<Complex> dg(static_cast<std::size_t>(N) * N);
  std::vector<Complex> dR(R.values().size());
  StateGradient out;
  for (const ParamDerivative& entry : dcms.entries) {
    detail::Coeffs dc(entry.d);
    detail::two_seed_block<true>(c, &dc, R.g_seed().data(), dg.data(), N, t);
    detail::two_seed_dots(dg.data(), psi.amplitudes(), R, dR.data(), t, nullptr);
    detail::two_rows<true>(c, &dc, R.values().data(), R, dR.data(), t, nullptr);
    FockState d(2, N);
    for (int m = 0; m < N; ++m) {
      for (int n = 0; n < N; ++n) d(m, n) = dR[R.index(m, n, 0, 0)];
    }
    out.ids.push_back(entry.id);
    out.dpsi.push_back(std::move(d));
  }
  return out;
}

StateGradient d_evolve(const CMuSigma& cms, const ParamGradients& dcms, const FockState& psi,
                       const RTensor& R) {
  return psi.modes() == 1 ? d_evolve_single(cms, dcms, psi, R) : d_evolve_two(cms, dcms, psi, R);
}

UpstreamCotangent backprop_to_input(const GTensor& g, const UpstreamCotangent& upstream) {
  const FockState& u = upstream.dl_dpsi_conj;
  if (g.modes != u.modes() || g.cutoff != u.cutoff()) {
    throw std::invalid_argument("backprop_to_input: cotangent shape does not match the transform");
  }
  const std::size_t d = g.dim();
  FockState down(u.modes(), u.cutoff());
  for (std::size_t out = 0; out < d; ++out) {
    const Complex uo = u[out];
    if (uo == Complex{}) continue;
    const Complex* row = g.data.data() + out * d;
    for (std::size_t in = 0; in < d; ++in) down[in] += uo * std::conj(row[in]);
  }
  return {std::move(down)};
}

UpstreamCotangent backprop_to_input(const CMuSigma& cms, const UpstreamCotangent& upstream,
                                    int cutoff, int modes, std::size_t max_entries) {
  if (upstream.dl_dpsi_conj.modes() != modes || upstream.dl_dpsi_conj.cutoff() != cutoff) {
    throw std::invalid_argument("backprop_to_input: cotangent must be shaped N^M");
  }
  return backprop_to_input(full_g_tensor(cms, cutoff, modes, max_entries), upstream);
}

KerrBackward kerr_gradients(std::span<const double> kappa, const FockState& psi_in,
                            const UpstreamCotangent& upstream) {
  const FockState& u = upstream.dl_dpsi_conj;
  require_same_shape(psi_in, u, "kerr_gradients");
  if (kappa.size() != static_cast<std::size_t>(psi_in.modes())) {
    throw std::invalid_argument("kerr_gradients: one strength per mode required");
  }
  const int N = psi_in.cutoff();
  const int M = psi_in.modes();
  KerrBackward out{std::vector<double>(M, 0.0), {FockState(M, N)}};
  FockState& down = out.downstream.dl_dpsi_conj;
  auto visit = [&](std::size_t flat, int k1, int k2) {
    const double angle = kappa[0] * k1 * k1 + (M == 2 ? kappa[1] * k2 * k2 : 0.0);
    const Complex phase = std::exp(kI * angle);
    const Complex psi_out = phase * psi_in[flat];
    // 2 Re[u (-i k^2) conj(psi_out)]
    const Complex w = u[flat] * (-kI) * std::conj(psi_out);
    out.dl_dkappa[0] += 2.0 * w.real() * k1 * k1;
    if (M == 2) out.dl_dkappa[1] += 2.0 * w.real() * k2 * k2;
    down[flat] = u[flat] * std::conj(phase);
  };
  if (M == 1) {
    for (int k = 0; k < N; ++k) visit(k, k, 0);
  } else {
    for (int m = 0; m < N; ++m) {
      for (int n = 0; n < N; ++n) visit(static_cast<std::size_t>(m) * N + n, m, n);
    }
  }
  return out;
}

std::vector<ParamCotangent> wirtinger_pair(const UpstreamCotangent& upstream,
                                           const StateGradient& grads) {
  const FockState& u = upstream.dl_dpsi_conj;
  if (grads.dpsi.empty()) throw std::invalid_argument("wirtinger_pair: empty gradient");
  const int M = grads.dpsi.front().modes();
  for (const FockState& d : grads.dpsi) require_same_shape(u, d, "wirtinger_pair");

  // sum_k dL/dpsi_k* conj(d psi_k) and sum_k dL/dpsi_k d psi_k
  auto pair_sums = [&u](const FockState& d) {
    Complex through_conj{}, through_direct{};
    for (std::size_t i = 0; i < u.size(); ++i) {
      through_conj += u[i] * std::conj(d[i]);
      through_direct += std::conj(u[i]) * d[i];
    }
    return std::pair{through_conj, through_direct};
  };

  std::vector<ParamCotangent> out;
  for (ParamId id : gaussian_parameter_ids(M)) {
    if (id.kind == ParamKind::Gamma) {
      // dL/dgamma* = sum u conj(dpsi/dgamma) + conj(u) dpsi/dgamma*
      Complex a = pair_sums(grads.at(id)).first;
      Complex b = pair_sums(grads.at({ParamKind::GammaConj, id.mode})).second;
      out.push_back({id, a + b});
    } else {
      auto [a, b] = pair_sums(grads.at(id));
      Complex v = a + b;
      if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
        throw NumericalError(std::string("wirtinger_pair: imaginary residue on real parameter ") +
                             to_string(id.kind));
      }
      out.push_back({id, Complex(v.real(), 0.0)});
    }
  }
  return out;
}

}  // namespace fockflow
