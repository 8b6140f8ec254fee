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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fockflow/experiment.hpp"
#include "oracles.hpp"

namespace fockflow {
namespace {

using testing::RealCoordinate;

double max_abs(const SmallMatrix& m) { return m.cwiseAbs().maxCoeff(); }

TEST(Beamsplitter, ZeroAngleIsIdentity) {
  for (double varphi : {0.0, 0.7, -2.1}) {
    EXPECT_LT(max_abs(beamsplitter_unitary(0.0, varphi) - SmallMatrix::Identity(2, 2)), 1e-15);
  }
}

TEST(Beamsplitter, QuarterTurnSwaps) {
  SmallMatrix expected(2, 2);
  expected << 0.0, -1.0, 1.0, 0.0;
  EXPECT_LT(max_abs(beamsplitter_unitary(std::numbers::pi / 2, 0.0) - expected), 1e-15);
}

TEST(Beamsplitter, FiftyFifty) {
  const double h = 1.0 / std::sqrt(2.0);
  SmallMatrix expected(2, 2);
  expected << h, -h, h, h;
  EXPECT_LT(max_abs(beamsplitter_unitary(std::numbers::pi / 4, 0.0) - expected), 1e-15);
}

TEST(Beamsplitter, Unitary) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-7.0, 7.0);
  for (int i = 0; i < 200; ++i) {
    SmallMatrix b = beamsplitter_unitary(angle(rng), angle(rng));
    EXPECT_LT(max_abs(b.adjoint() * b - SmallMatrix::Identity(2, 2)), 1e-14);
  }
}

TEST(Interferometers, SingleModeIsPhase) {
  GaussianParams p = GaussianParams::identity(1);
  Interferometers ifm = build_interferometers(p);
  EXPECT_EQ(ifm.W(0, 0), Complex(1.0, 0.0));
  EXPECT_EQ(ifm.V(0, 0), Complex(1.0, 0.0));
  p.phi[0] = std::numbers::pi / 2;
  ifm = build_interferometers(p);
  EXPECT_LT(std::abs(ifm.W(0, 0) - kI), 1e-15);
  EXPECT_EQ(ifm.V(0, 0), Complex(1.0, 0.0));
}

TEST(Interferometers, TwoModeIdentity) {
  Interferometers ifm = build_interferometers(GaussianParams::identity(2));
  EXPECT_LT(max_abs(ifm.W - SmallMatrix::Identity(2, 2)), 1e-15);
  EXPECT_LT(max_abs(ifm.V - SmallMatrix::Identity(2, 2)), 1e-15);
}

TEST(Interferometers, RejectsBadModeCount) {
  GaussianParams p = GaussianParams::identity(1);
  p.modes = 3;
  EXPECT_THROW(build_interferometers(p), std::invalid_argument);
  EXPECT_THROW(GaussianParams::identity(3), std::invalid_argument);
}

TEST(Interferometers, UnitaryOnRandomDraws) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    Interferometers ifm = build_interferometers(random_gaussian_params(2, rng));
    EXPECT_LT(max_abs(ifm.W.adjoint() * ifm.W - SmallMatrix::Identity(2, 2)), 1e-12);
    EXPECT_LT(max_abs(ifm.V.adjoint() * ifm.V - SmallMatrix::Identity(2, 2)), 1e-12);
  }
}

TEST(CMuSigma, IdentitySingleMode) {
  CMuSigma cms = compute_cmusigma(GaussianParams::identity(1));
  EXPECT_EQ(cms.C, Complex(1.0, 0.0));
  EXPECT_EQ(cms.mu(0), Complex{});
  EXPECT_EQ(cms.mu(1), Complex{});
  SmallMatrix expected(2, 2);
  expected << 0.0, -1.0, -1.0, 0.0;
  EXPECT_LT(max_abs(cms.Sigma - expected), 1e-15);
}

TEST(CMuSigma, UnitDisplacement) {
  GaussianParams p = GaussianParams::identity(1);
  p.gamma[0] = 1.0;
  CMuSigma cms = compute_cmusigma(p);
  EXPECT_LT(std::abs(cms.C - std::exp(-0.5)), 1e-15);
  EXPECT_LT(std::abs(cms.mu(0) - 1.0), 1e-15);
  EXPECT_LT(std::abs(cms.mu(1) + 1.0), 1e-15);
  EXPECT_LT(std::abs(cms.Sigma(0, 1) + 1.0), 1e-15);
  EXPECT_LT(std::abs(cms.Sigma(0, 0)), 1e-15);
}

TEST(CMuSigma, SqueezingWithTanhSixTenths) {
  GaussianParams p = GaussianParams::identity(1);
  p.r[0] = std::atanh(0.6);
  CMuSigma cms = compute_cmusigma(p);
  EXPECT_NEAR(cms.C.real(), 1.0 / std::sqrt(1.25), 1e-14);
  EXPECT_NEAR(cms.C.imag(), 0.0, 1e-15);
  EXPECT_LT(cms.mu.cwiseAbs().maxCoeff(), 1e-15);
  SmallMatrix expected(2, 2);
  expected << 0.6, -0.8, -0.8, -0.6;
  EXPECT_LT(max_abs(cms.Sigma - expected), 1e-14);
}

TEST(CMuSigma, SymmetricAndBounded) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const int modes = 1 + i % 2;
    CMuSigma cms = compute_cmusigma(random_gaussian_params(modes, rng, 1.0, 2.0));
    EXPECT_LT(max_abs(cms.Sigma - cms.Sigma.transpose()), 1e-12);
    EXPECT_LE(std::abs(cms.C), 1.0 + 1e-15);
    EXPECT_LE(max_abs(cms.Sigma), 1.0 + 1e-12);
  }
}

TEST(CMuSigma, RejectsInvalidParameters) {
  GaussianParams p = GaussianParams::identity(1);
  p.r[0] = -0.1;
  EXPECT_THROW(compute_cmusigma(p), std::invalid_argument);
  p.r[0] = std::nan("");
  EXPECT_THROW(compute_cmusigma(p), NumericalError);
  GaussianParams q = GaussianParams::identity(2);
  q.bs_pre.reset();
  EXPECT_THROW(compute_cmusigma(q), std::invalid_argument);
}

TEST(LargeSqueezing, VacuumLimit) {
  GaussianParams p = GaussianParams::identity(1);
  p.r[0] = 5.0;
  CMuSigma cms = compute_cmusigma_large_r(p);
  EXPECT_NEAR(cms.C.real(), std::sqrt(1.0 / std::cosh(5.0)), 1e-15);
  EXPECT_LT(cms.mu.cwiseAbs().maxCoeff(), 1e-15);
  SmallMatrix expected(2, 2);
  expected << 1.0, 0.0, 0.0, -1.0;
  EXPECT_LT(max_abs(cms.Sigma - expected), 1e-15);
}

TEST(LargeSqueezing, DisplacementMean) {
  GaussianParams p = GaussianParams::identity(1);
  p.gamma[0] = 1.0;
  for (double r : {0.5, 3.0, 9.0}) {
    p.r[0] = r;
    CMuSigma cms = compute_cmusigma_large_r(p);
    EXPECT_LT(std::abs(cms.mu(0) - 2.0), 1e-15);
    EXPECT_EQ(cms.mu(1), Complex{});
  }
}

TEST(LargeSqueezing, CloseToExactAtRSix) {
  GaussianParams p = GaussianParams::identity(1);
  p.r[0] = 6.0;
  EXPECT_LE(max_abs(compute_cmusigma(p).Sigma - compute_cmusigma_large_r(p).Sigma),
            1.0 / std::cosh(6.0));
}

TEST(LargeSqueezing, ConsistentForLargeR) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> rs(4.0, 12.0);
  for (int i = 0; i < 200; ++i) {
    GaussianParams p = random_gaussian_params(1, rng);
    p.r[0] = rs(rng);
    const double bound = 2.0 / std::cosh(p.r[0]);
    CMuSigma exact = compute_cmusigma(p);
    CMuSigma approx = compute_cmusigma_large_r(p);
    EXPECT_LE(max_abs(exact.Sigma - approx.Sigma), bound);
    EXPECT_LE((exact.mu - approx.mu).cwiseAbs().maxCoeff(), bound);
    EXPECT_LE(std::abs(exact.C / approx.C - 1.0), bound);
  }
}

TEST(LargeSqueezing, RejectsTwoModes) {
  EXPECT_THROW(compute_cmusigma_large_r(GaussianParams::identity(2)), std::invalid_argument);
}

TEST(ParamGradients, StationaryAtOrigin) {
  ParamGradients g = compute_param_gradients(GaussianParams::identity(1));
  EXPECT_EQ(g.at({ParamKind::GammaConj, 0}).d.C, Complex{});
  EXPECT_EQ(g.at({ParamKind::Gamma, 0}).d.C, Complex{});
}

TEST(ParamGradients, SigmaSqueezingDerivative) {
  GaussianParams p = GaussianParams::identity(1);
  for (double r : {0.0, 0.3, 1.7}) {
    p.r[0] = r;
    const double s = 1.0 / std::cosh(r);
    EXPECT_LT(std::abs(compute_param_gradients(p).at({ParamKind::R, 0}).d.Sigma(0, 0) - s * s), 1e-15);
  }
}

TEST(ParamGradients, EntriesPerMode) {
  EXPECT_EQ(compute_param_gradients(GaussianParams::identity(1)).entries.size(), 5u);
  EXPECT_EQ(compute_param_gradients(GaussianParams::identity(2)).entries.size(), 14u);
  EXPECT_THROW(compute_param_gradients(GaussianParams::identity(1)).at({ParamKind::BsPreTheta, 0}),
               std::out_of_range);
}

// Every analytic partial against central differences of compute_cmusigma.
void check_against_finite_differences(const GaussianParams& p) {
  constexpr double h = 1e-6;
  constexpr double rel = 1e-5;
  constexpr double floor = 1e-8;
  const ParamGradients grads = compute_param_gradients(p);
  const int M = p.modes;

  // Real-coordinate derivative of every (C, mu, Sigma) component.
  auto fd = [&](RealCoordinate c) {
    CMuSigma plus = compute_cmusigma(testing::shifted(p, c, h));
    CMuSigma minus = compute_cmusigma(testing::shifted(p, c, -h));
    CMuSigma d;
    d.C = (plus.C - minus.C) / (2 * h);
    d.mu = (plus.mu - minus.mu) / (2 * h);
    d.Sigma = (plus.Sigma - minus.Sigma) / (2 * h);
    return d;
  };
  auto compare = [&](const CMuSigma& analytic, const CMuSigma& numeric, const char* name) {
    EXPECT_TRUE(testing::close(analytic.C, numeric.C, rel, floor)) << name << " C";
    for (int i = 0; i < 2 * M; ++i) {
      EXPECT_TRUE(testing::close(analytic.mu(i), numeric.mu(i), rel, floor)) << name << " mu" << i;
      for (int j = 0; j < 2 * M; ++j) {
        EXPECT_TRUE(testing::close(analytic.Sigma(i, j), numeric.Sigma(i, j), rel, floor))
            << name << " Sigma" << i << j;
      }
    }
  };
  for (ParamId id : gaussian_parameter_ids(M)) {
    if (id.kind == ParamKind::Gamma) {
      CMuSigma dx = fd({id, false});
      CMuSigma dy = fd({id, true});
      // d/dgamma = (d/dx - i d/dy)/2, d/dgamma* = (d/dx + i d/dy)/2
      CMuSigma wg, wgc;
      wg.C = 0.5 * (dx.C - kI * dy.C);
      wgc.C = 0.5 * (dx.C + kI * dy.C);
      wg.mu = 0.5 * (dx.mu - kI * dy.mu);
      wgc.mu = 0.5 * (dx.mu + kI * dy.mu);
      wg.Sigma = 0.5 * (dx.Sigma - kI * dy.Sigma);
      wgc.Sigma = 0.5 * (dx.Sigma + kI * dy.Sigma);
      compare(grads.at(id).d, wg, "gamma");
      compare(grads.at({ParamKind::GammaConj, id.mode}).d, wgc, "gamma*");
    } else {
      compare(grads.at(id).d, fd({id, false}), to_string(id.kind));
    }
  }
}

TEST(ParamGradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    GaussianParams p = random_gaussian_params(1 + i % 2, rng, 1.0, 1.5);
    // keep r away from the r >= 0 boundary so both sides of the stencil exist
    for (double& r : p.r) r += 1e-3;
    check_against_finite_differences(p);
  }
}

TEST(ParamGradients, DeltaDerivativeVanishesWithoutSqueezing) {
  GaussianParams p = GaussianParams::identity(2);
  p.gamma = {Complex(0.3, -0.2), Complex(0.1, 0.4)};
  p.delta = {0.8, -1.1};
  ParamGradients g = compute_param_gradients(p);
  for (int i = 0; i < 2; ++i) {
    const CMuSigma& d = g.at({ParamKind::Delta, i}).d;
    EXPECT_EQ(std::abs(d.C), 0.0);
    EXPECT_EQ(d.Sigma.cwiseAbs().maxCoeff(), 0.0);
  }
}

}  // namespace
}  // namespace fockflow
