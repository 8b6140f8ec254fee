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

// Test-only reference computations, independent of the recurrence code.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "fockflow/evolve.hpp"
#include "fockflow/params.hpp"

namespace fockflow::testing {

using DenseMatrix = Eigen::MatrixXcd;

inline double factorial(int n) { return std::tgamma(n + 1.0); }

/// e^{-|g|^2/2} g^m / sqrt(m!)
inline Complex coherent_amplitude(Complex g, int m) {
  return std::exp(-0.5 * std::norm(g)) * std::pow(g, m) / std::sqrt(factorial(m));
}

/// S(zeta)|0> with zeta = r e^{i delta}.
inline Complex squeezed_vacuum_amplitude(double r, double delta, int k) {
  if (k % 2) return 0.0;
  const int n = k / 2;
  const Complex base = -std::exp(kI * delta) * std::tanh(r);
  return std::pow(base, n) * std::sqrt(factorial(2 * n)) / (std::pow(2.0, n) * factorial(n)) /
         std::sqrt(std::cosh(r));
}

/// Annihilation operator truncated at dimension d.
inline DenseMatrix annihilation(int d) {
  DenseMatrix a = DenseMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

/// D(gamma) R(phi) S(r e^{i delta}) built from matrix exponentials in a
/// space of dimension big, then cropped to cutoff x cutoff.
inline DenseMatrix single_mode_unitary(const GaussianParams& p, int cutoff, int big) {
  const DenseMatrix a = annihilation(big);
  const DenseMatrix ad = a.adjoint();
  const Complex zeta = p.r[0] * std::exp(kI * p.delta[0]);
  const Complex g = p.gamma[0];
  DenseMatrix S = (0.5 * (std::conj(zeta) * a * a - zeta * ad * ad)).exp();
  DenseMatrix R = (kI * p.phi[0] * ad * a).exp();
  DenseMatrix D = (g * ad - std::conj(g) * a).exp();
  return (D * R * S).topLeftCorner(cutoff, cutoff);
}

/// Two-mode counterpart: D R B(post) S B(pre) with the beamsplitter
/// generator theta (e^{i varphi} a b^dag - e^{-i varphi} a^dag b).
/// Returned as an (N^2 x N^2) matrix over row-major (m, n) indices.
inline DenseMatrix two_mode_unitary(const GaussianParams& p, int cutoff, int big) {
  const DenseMatrix a1 = annihilation(big);
  const DenseMatrix id = DenseMatrix::Identity(big, big);
  auto kron = [](const DenseMatrix& x, const DenseMatrix& y) {
    DenseMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
  };
  const DenseMatrix a = kron(a1, id), b = kron(id, a1);
  const DenseMatrix ad = a.adjoint(), bd = b.adjoint();
  auto bs = [&](const BeamsplitterAngles& angles) {
    const Complex e = std::exp(kI * angles.varphi);
    return DenseMatrix((angles.theta * (e * a * bd - std::conj(e) * ad * b)).exp());
  };
  DenseMatrix gen_s = DenseMatrix::Zero(a.rows(), a.cols());
  DenseMatrix gen_r = gen_s, gen_d = gen_s;
  const DenseMatrix* ops[2] = {&a, &b};
  for (int i = 0; i < 2; ++i) {
    const DenseMatrix& x = *ops[i];
    const DenseMatrix xd = x.adjoint();
    const Complex zeta = p.r[i] * std::exp(kI * p.delta[i]);
    gen_s += 0.5 * (std::conj(zeta) * x * x - zeta * xd * xd);
    gen_r += kI * p.phi[i] * xd * x;
    gen_d += p.gamma[i] * xd - std::conj(p.gamma[i]) * x;
  }
  DenseMatrix U = gen_d.exp() * gen_r.exp() * bs(*p.bs_post) * gen_s.exp() * bs(*p.bs_pre);
  DenseMatrix out(cutoff * cutoff, cutoff * cutoff);
  for (int m = 0; m < cutoff; ++m)
    for (int n = 0; n < cutoff; ++n)
      for (int p1 = 0; p1 < cutoff; ++p1)
        for (int q = 0; q < cutoff; ++q) out(m * cutoff + n, p1 * cutoff + q) = U(m * big + n, p1 * big + q);
  return out;
}

/// Removes the global phase that best aligns `test` with `ref`.
inline double phase_aligned_max_diff(const DenseMatrix& ref, const DenseMatrix& test) {
  const Complex overlap = (ref.adjoint() * test).trace();
  const Complex phase = std::abs(overlap) > 0 ? std::conj(overlap) / std::abs(overlap) : 1.0;
  return (ref - phase * test).cwiseAbs().maxCoeff();
}

inline DenseMatrix as_matrix(const GTensor& g) {
  const auto d = static_cast<Eigen::Index>(g.dim());
  DenseMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = g(i, j);
  return m;
}

/// Visits every real coordinate of p: fn(id, coordinate pointer). Gamma is
/// visited as two real coordinates (real and imaginary part).
struct RealCoordinate {
  ParamId id;
  bool imaginary_part;
};

inline std::vector<RealCoordinate> real_coordinates(int modes) {
  std::vector<RealCoordinate> out;
  for (ParamId id : gaussian_parameter_ids(modes)) {
    out.push_back({id, false});
    if (id.kind == ParamKind::Gamma) out.push_back({id, true});
  }
  return out;
}

inline GaussianParams shifted(GaussianParams p, RealCoordinate c, double h) {
  const int i = c.id.mode;
  switch (c.id.kind) {
    case ParamKind::Gamma: p.gamma[i] += c.imaginary_part ? Complex(0, h) : Complex(h, 0); break;
    case ParamKind::R: p.r[i] += h; break;
    case ParamKind::Delta: p.delta[i] += h; break;
    case ParamKind::Phi: p.phi[i] += h; break;
    case ParamKind::BsPreTheta: p.bs_pre->theta += h; break;
    case ParamKind::BsPreVarphi: p.bs_pre->varphi += h; break;
    case ParamKind::BsPostTheta: p.bs_post->theta += h; break;
    case ParamKind::BsPostVarphi: p.bs_post->varphi += h; break;
    case ParamKind::GammaConj: break;
  }
  return p;
}

/// Central difference of a complex-valued function of one real coordinate.
template <typename Fn>
auto central_difference(const GaussianParams& p, RealCoordinate c, double h, Fn fn) {
  auto plus = fn(shifted(p, c, h));
  auto minus = fn(shifted(p, c, -h));
  return (plus - minus) / (2.0 * h);
}

inline bool close(double analytic, double numeric, double rel, double abs_floor) {
  return std::abs(analytic - numeric) <= std::max(abs_floor, rel * std::max(std::abs(analytic), std::abs(numeric)));
}

inline bool close(Complex analytic, Complex numeric, double rel, double abs_floor) {
  return std::abs(analytic - numeric) <= std::max(abs_floor, rel * std::max(std::abs(analytic), std::abs(numeric)));
}

}  // namespace fockflow::testing
