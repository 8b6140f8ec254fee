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

#include "fockflow/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fockflow {
namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

SmallMatrix diag(const SmallVector& v) {
  SmallMatrix m = SmallMatrix::Zero(v.size(), v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) m(i, i) = v(i);
  return m;
}

SmallMatrix d_beamsplitter_dtheta(double theta, double varphi) {
  SmallMatrix b(2, 2);
  b(0, 0) = -std::sin(theta);
  b(0, 1) = -std::exp(-kI * varphi) * std::cos(theta);
  b(1, 0) = std::exp(kI * varphi) * std::cos(theta);
  b(1, 1) = -std::sin(theta);
  return b;
}

SmallMatrix d_beamsplitter_dvarphi(double theta, double varphi) {
  SmallMatrix b = SmallMatrix::Zero(2, 2);
  b(0, 1) = kI * std::exp(-kI * varphi) * std::sin(theta);
  b(1, 0) = kI * std::exp(kI * varphi) * std::sin(theta);
  return b;
}

// Everything the derivative formulas re-read from the forward computation.
struct Expansion {
  int modes;
  SmallMatrix W, V;
  SmallVector T, S, Tbar;  // diagonals: e^{i delta} tanh r, sech r, e^{-i delta} tanh r
  SmallMatrix A, B, D;     // Sigma blocks
  SmallVector g, gc;
  Complex C;
};

Expansion expand(const GaussianParams& p) {
  p.validate();
  Expansion e;
  e.modes = p.modes;
  Interferometers ifm = build_interferometers(p);
  e.W = ifm.W;
  e.V = ifm.V;
  const int M = p.modes;
  e.T.resize(M);
  e.S.resize(M);
  e.Tbar.resize(M);
  e.g.resize(M);
  double cosh_prod = 1.0;
  for (int i = 0; i < M; ++i) {
    double t = std::tanh(p.r[i]);
    e.T(i) = std::exp(kI * p.delta[i]) * t;
    e.Tbar(i) = std::exp(-kI * p.delta[i]) * t;
    e.S(i) = 1.0 / std::cosh(p.r[i]);
    e.g(i) = p.gamma[i];
    cosh_prod *= std::cosh(p.r[i]);
  }
  e.gc = e.g.conjugate();
  e.A = e.W * diag(e.T) * e.W.transpose();
  e.B = -(e.W * diag(e.S) * e.V);
  e.D = -(e.V.transpose() * diag(e.Tbar) * e.V);
  Complex exponent = e.g.squaredNorm() + (e.gc.transpose() * e.A * e.gc)(0, 0);
  e.C = std::exp(-0.5 * exponent) / std::sqrt(cosh_prod);
  return e;
}

CMuSigma assemble(int M, Complex C, const SmallVector& mu_out, const SmallVector& mu_in,
                  const SmallMatrix& A, const SmallMatrix& B, const SmallMatrix& D) {
  CMuSigma out;
  out.C = C;
  out.mu.resize(2 * M);
  out.mu << mu_out, mu_in;
  out.Sigma.resize(2 * M, 2 * M);
  out.Sigma.topLeftCorner(M, M) = A;
  out.Sigma.topRightCorner(M, M) = B;
  out.Sigma.bottomLeftCorner(M, M) = B.transpose();
  out.Sigma.bottomRightCorner(M, M) = D;
  return out;
}

// Derivative along a real direction that moves W, V and the squeezing
// diagonals. dlog_cosh is d(sum log cosh r_i) along the same direction.
CMuSigma directional(const Expansion& e, const SmallMatrix& dW, const SmallMatrix& dV,
                     const SmallVector& dT, const SmallVector& dS, const SmallVector& dTbar,
                     double dlog_cosh) {
  const int M = e.modes;
  SmallMatrix dA = dW * diag(e.T) * e.W.transpose() + e.W * diag(dT) * e.W.transpose() +
                   e.W * diag(e.T) * dW.transpose();
  SmallMatrix dB = -(dW * diag(e.S) * e.V + e.W * diag(dS) * e.V + e.W * diag(e.S) * dV);
  SmallMatrix dD = -(dV.transpose() * diag(e.Tbar) * e.V + e.V.transpose() * diag(dTbar) * e.V +
                     e.V.transpose() * diag(e.Tbar) * dV);
  Complex dexp = (e.gc.transpose() * dA * e.gc)(0, 0);
  Complex dC = e.C * (-0.5 * dexp - 0.5 * dlog_cosh);
  SmallVector dmu_out = dA * e.gc;
  SmallVector dmu_in = dB.transpose() * e.gc;
  return assemble(M, dC, dmu_out, dmu_in, dA, dB, dD);
}

}  // namespace

const char* to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::Gamma: return "gamma";
    case ParamKind::GammaConj: return "gamma*";
    case ParamKind::R: return "r";
    case ParamKind::Delta: return "delta";
    case ParamKind::Phi: return "phi";
    case ParamKind::BsPreTheta: return "bs_pre.theta";
    case ParamKind::BsPreVarphi: return "bs_pre.varphi";
    case ParamKind::BsPostTheta: return "bs_post.theta";
    case ParamKind::BsPostVarphi: return "bs_post.varphi";
  }
  return "?";
}

GaussianParams GaussianParams::identity(int modes) {
  if (modes < 1 || modes > 2) {
    throw std::invalid_argument("GaussianParams: modes must be 1 or 2, got " + std::to_string(modes));
  }
  GaussianParams p;
  p.modes = modes;
  p.gamma.assign(modes, Complex{});
  p.r.assign(modes, 0.0);
  p.delta.assign(modes, 0.0);
  p.phi.assign(modes, 0.0);
  if (modes == 2) {
    p.bs_pre = BeamsplitterAngles{};
    p.bs_post = BeamsplitterAngles{};
  }
  return p;
}

void GaussianParams::validate() const {
  if (modes < 1 || modes > 2) {
    throw std::invalid_argument("GaussianParams: modes must be 1 or 2, got " + std::to_string(modes));
  }
  const auto M = static_cast<std::size_t>(modes);
  if (gamma.size() != M || r.size() != M || delta.size() != M || phi.size() != M) {
    throw std::invalid_argument("GaussianParams: parameter vectors must have length " +
                                std::to_string(modes));
  }
  if ((modes == 2) != (bs_pre.has_value() && bs_post.has_value()) ||
      (modes == 1 && (bs_pre || bs_post))) {
    throw std::invalid_argument("GaussianParams: beamsplitters are required for two modes only");
  }
  for (std::size_t i = 0; i < M; ++i) {
    if (!finite(gamma[i]) || !std::isfinite(r[i]) || !std::isfinite(delta[i]) ||
        !std::isfinite(phi[i])) {
      throw NumericalError("GaussianParams: non-finite parameter");
    }
    if (r[i] < 0.0) {
      throw std::invalid_argument("GaussianParams: squeezing magnitude must be >= 0");
    }
  }
  for (const auto& bs : {bs_pre, bs_post}) {
    if (bs && (!std::isfinite(bs->theta) || !std::isfinite(bs->varphi))) {
      throw NumericalError("GaussianParams: non-finite beamsplitter angle");
    }
  }
}

std::vector<ParamId> gaussian_parameter_ids(int modes) {
  std::vector<ParamId> ids;
  for (ParamKind kind : {ParamKind::Gamma, ParamKind::R, ParamKind::Delta, ParamKind::Phi}) {
    for (int i = 0; i < modes; ++i) ids.push_back({kind, i});
  }
  if (modes == 2) {
    ids.push_back({ParamKind::BsPreTheta, 0});
    ids.push_back({ParamKind::BsPreVarphi, 0});
    ids.push_back({ParamKind::BsPostTheta, 0});
    ids.push_back({ParamKind::BsPostVarphi, 0});
  }
  return ids;
}

const ParamDerivative& ParamGradients::at(ParamId id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e;
  }
  throw std::out_of_range(std::string("ParamGradients: no entry for ") + to_string(id.kind));
}

SmallMatrix beamsplitter_unitary(double theta, double varphi) {
  SmallMatrix b(2, 2);
  b(0, 0) = std::cos(theta);
  b(0, 1) = -std::exp(-kI * varphi) * std::sin(theta);
  b(1, 0) = std::exp(kI * varphi) * std::sin(theta);
  b(1, 1) = std::cos(theta);
  return b;
}

Interferometers build_interferometers(const GaussianParams& p) {
  if (p.modes == 1) {
    if (p.phi.size() != 1) throw std::invalid_argument("build_interferometers: phi size");
    Interferometers out{SmallMatrix(1, 1), SmallMatrix::Identity(1, 1)};
    out.W(0, 0) = std::exp(kI * p.phi[0]);
    return out;
  }
  if (p.modes != 2) {
    throw std::invalid_argument("build_interferometers: modes must be 1 or 2, got " +
                                std::to_string(p.modes));
  }
  if (!p.bs_pre || !p.bs_post || p.phi.size() != 2) {
    throw std::invalid_argument("build_interferometers: two-mode parameters incomplete");
  }
  SmallMatrix rot = SmallMatrix::Zero(2, 2);
  rot(0, 0) = std::exp(kI * p.phi[0]);
  rot(1, 1) = std::exp(kI * p.phi[1]);
  return {rot * beamsplitter_unitary(p.bs_post->theta, p.bs_post->varphi),
          beamsplitter_unitary(p.bs_pre->theta, p.bs_pre->varphi)};
}

CMuSigma compute_cmusigma(const GaussianParams& p) {
  Expansion e = expand(p);
  SmallVector mu_out = e.A * e.gc + e.g;
  SmallVector mu_in = e.B.transpose() * e.gc;
  return assemble(e.modes, e.C, mu_out, mu_in, e.A, e.B, e.D);
}

CMuSigma compute_cmusigma_large_r(const GaussianParams& p) {
  if (p.modes != 1) {
    throw std::invalid_argument("compute_cmusigma_large_r: single mode only");
  }
  p.validate();
  const Complex g = p.gamma[0];
  const Complex phase = std::exp(kI * (p.delta[0] + 2.0 * p.phi[0]));
  CMuSigma out;
  out.C = std::sqrt(1.0 / std::cosh(p.r[0])) *
          std::exp(-0.5 * std::norm(g) - 0.5 * std::conj(g) * std::conj(g) * phase);
  out.mu.resize(2);
  out.mu << std::conj(g) * phase + g, 0.0;
  out.Sigma = SmallMatrix::Zero(2, 2);
  out.Sigma(0, 0) = phase;
  out.Sigma(1, 1) = -std::exp(-kI * p.delta[0]);
  return out;
}

ParamGradients compute_param_gradients(const GaussianParams& p) {
  Expansion e = expand(p);
  const int M = e.modes;
  const SmallMatrix zero = SmallMatrix::Zero(M, M);
  const SmallVector zv = SmallVector::Zero(M);
  ParamGradients out;

  for (int i = 0; i < M; ++i) {
    SmallVector dmu_out = zv;
    dmu_out(i) = 1.0;
    out.entries.push_back({{ParamKind::Gamma, i},
                           assemble(M, -0.5 * e.gc(i) * e.C, dmu_out, zv, zero, zero, zero)});
  }
  for (int i = 0; i < M; ++i) {
    SmallVector dmu_out = e.A.col(i);
    SmallVector dmu_in = e.B.row(i).transpose();
    Complex dC = -0.5 * e.C * (e.g(i) + 2.0 * (e.A * e.gc)(i));
    out.entries.push_back(
        {{ParamKind::GammaConj, i}, assemble(M, dC, dmu_out, dmu_in, zero, zero, zero)});
  }
  for (int i = 0; i < M; ++i) {
    double t = std::tanh(p.r[i]);
    double s = 1.0 / std::cosh(p.r[i]);
    SmallVector dT = zv, dS = zv, dTbar = zv;
    dT(i) = std::exp(kI * p.delta[i]) * s * s;
    dTbar(i) = std::exp(-kI * p.delta[i]) * s * s;
    dS(i) = -s * t;
    out.entries.push_back({{ParamKind::R, i}, directional(e, zero, zero, dT, dS, dTbar, t)});
  }
  for (int i = 0; i < M; ++i) {
    SmallVector dT = zv, dTbar = zv;
    dT(i) = kI * e.T(i);
    dTbar(i) = -kI * e.Tbar(i);
    out.entries.push_back({{ParamKind::Delta, i}, directional(e, zero, zero, dT, zv, dTbar, 0.0)});
  }
  for (int i = 0; i < M; ++i) {
    // W = diag(e^{i phi}) B', so dW/dphi_i scales row i by i.
    SmallMatrix dW = zero;
    dW.row(i) = kI * e.W.row(i);
    out.entries.push_back({{ParamKind::Phi, i}, directional(e, dW, zero, zv, zv, zv, 0.0)});
  }
  if (M == 2) {
    SmallMatrix rot = SmallMatrix::Zero(2, 2);
    rot(0, 0) = std::exp(kI * p.phi[0]);
    rot(1, 1) = std::exp(kI * p.phi[1]);
    const auto& pre = *p.bs_pre;
    const auto& post = *p.bs_post;
    out.entries.push_back({{ParamKind::BsPreTheta, 0},
                           directional(e, zero, d_beamsplitter_dtheta(pre.theta, pre.varphi), zv,
                                       zv, zv, 0.0)});
    out.entries.push_back({{ParamKind::BsPreVarphi, 0},
                           directional(e, zero, d_beamsplitter_dvarphi(pre.theta, pre.varphi), zv,
                                       zv, zv, 0.0)});
    out.entries.push_back({{ParamKind::BsPostTheta, 0},
                           directional(e, rot * d_beamsplitter_dtheta(post.theta, post.varphi),
                                       zero, zv, zv, zv, 0.0)});
    out.entries.push_back({{ParamKind::BsPostVarphi, 0},
                           directional(e, rot * d_beamsplitter_dvarphi(post.theta, post.varphi),
                                       zero, zv, zv, zv, 0.0)});
  }
  return out;
}

}  // namespace fockflow
