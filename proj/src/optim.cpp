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

#include "fockflow/optim.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

namespace fockflow {
namespace {

void check_grads(const ParameterVector& params, std::span<const Complex> grads) {
  if (grads.size() != params.size()) {
    throw std::invalid_argument("optimizer: gradient and parameter sizes differ");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i].real()) || !std::isfinite(grads[i].imag())) {
      throw NumericalError("optimizer: non-finite gradient at coordinate " + std::to_string(i));
    }
  }
}

std::int64_t clamp_magnitudes(ParameterVector& params) {
  std::int64_t clamped = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.kinds[i] == CoordKind::Magnitude && params.values[i].real() < 0.0) {
      params.values[i] = 0.0;
      ++clamped;
    }
  }
  return clamped;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("optimizer: learning_rate must be > 0");
  if (steps < 1) throw std::invalid_argument("optimizer: steps must be >= 1");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("optimizer: moment decay rates must lie in (0, 1)");
  }
  if (!(epsilon_hat > 0.0)) throw std::invalid_argument("optimizer: epsilon_hat must be > 0");
  if (!(init_scale >= 0.0)) throw std::invalid_argument("optimizer: init_scale must be >= 0");
}

TrainingAborted::TrainingAborted(int step, const std::string& what)
    : NumericalError("training aborted at step " + std::to_string(step) + ": " + what),
      step_(step) {}

std::int64_t sgd_step(ParameterVector& params, std::span<const Complex> grads, double lr) {
  check_grads(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.kinds[i] == CoordKind::Complex) {
      params.values[i] -= lr * grads[i];
    } else {
      params.values[i] = params.values[i].real() - lr * grads[i].real();
    }
  }
  return clamp_magnitudes(params);
}

std::int64_t adam_step(ParameterVector& params, std::span<const Complex> grads, AdamState& state,
                       const OptimizerConfig& cfg) {
  check_grads(params, grads);
  if (state.first.empty()) {
    state.first.assign(params.size(), Complex{});
    state.second.assign(params.size(), Complex{});
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  auto update = [&](double g, double& m, double& v) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
    return cfg.learning_rate * (m / c1) / (std::sqrt(v / c2) + cfg.epsilon_hat);
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    double m_re = state.first[i].real(), m_im = state.first[i].imag();
    double v_re = state.second[i].real(), v_im = state.second[i].imag();
    double step_re = update(grads[i].real(), m_re, v_re);
    double step_im = 0.0;
    if (params.kinds[i] == CoordKind::Complex) step_im = update(grads[i].imag(), m_im, v_im);
    state.first[i] = {m_re, m_im};
    state.second[i] = {v_re, v_im};
    params.values[i] -= Complex(step_re, step_im);
  }
  return clamp_magnitudes(params);
}

ParameterVector random_initialization(const Circuit& c, const OptimizerConfig& cfg) {
  ParameterVector p = c.parameters();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> sym(-cfg.init_scale, cfg.init_scale);
  std::uniform_real_distribution<double> pos(0.0, cfg.init_scale);
  for (std::size_t i = 0; i < p.size(); ++i) {
    switch (p.kinds[i]) {
      case CoordKind::Complex: {
        double re = sym(rng);
        double im = sym(rng);
        p.values[i] = {re, im};
        break;
      }
      case CoordKind::Real: p.values[i] = sym(rng); break;
      case CoordKind::Magnitude: p.values[i] = pos(rng); break;
    }
  }
  return p;
}

TrainReport train(Circuit& c, const TrainingSet& ts, const OptimizerConfig& cfg) {
  cfg.validate();
  ts.validate(c.modes(), c.cutoff());
  const auto start = std::chrono::steady_clock::now();
  TrainReport report;
  ParameterVector params = random_initialization(c, cfg);
  c.set_parameters(params);
  AdamState adam;
  for (int step = 0; step < cfg.steps; ++step) {
    Evaluation ev;
    try {
      ev = evaluate(c, ts, cfg.loss, cfg.threads);
    } catch (const NumericalError& e) {
      throw TrainingAborted(step, e.what());
    }
    if (!std::isfinite(ev.loss)) throw TrainingAborted(step, "non-finite loss");
    report.loss_trace.push_back(ev.loss);
    if (cfg.loss_floor && ev.loss < *cfg.loss_floor) break;
    try {
      report.clamp_count += cfg.algorithm == Algorithm::PlainSgd
                                ? sgd_step(params, ev.gradient, cfg.learning_rate)
                                : adam_step(params, ev.gradient, adam, cfg);
    } catch (const NumericalError& e) {
      throw TrainingAborted(step, e.what());
    }
    c.set_parameters(params);
  }
  Evaluation final_eval = evaluate(c, ts, cfg.loss, cfg.threads);
  report.final_loss = final_eval.loss;
  report.fidelities = std::move(final_eval.fidelities);
  report.normalized_fidelities = std::move(final_eval.normalized_fidelities);
  report.parameters = std::move(params);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace fockflow
