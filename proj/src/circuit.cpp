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

#include "fockflow/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>

#include "fockflow/grad.hpp"

namespace fockflow {
namespace {

// Pointer to the real coordinate named by id; nullptr for complex gamma.
template <typename Params>
auto real_coordinate(Params& g, ParamId id) -> decltype(&g.r[0]) {
  switch (id.kind) {
    case ParamKind::R: return &g.r[id.mode];
    case ParamKind::Delta: return &g.delta[id.mode];
    case ParamKind::Phi: return &g.phi[id.mode];
    case ParamKind::BsPreTheta: return &g.bs_pre->theta;
    case ParamKind::BsPreVarphi: return &g.bs_pre->varphi;
    case ParamKind::BsPostTheta: return &g.bs_post->theta;
    case ParamKind::BsPostVarphi: return &g.bs_post->varphi;
    default: return nullptr;
  }
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void for_each_pair(std::size_t count, int threads, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct LayerShared {
  ParamGradients dcms;
  std::optional<GTensor> g;
};

std::vector<LayerShared> prepare_backward(const Circuit& c, std::span<const ForwardPass> passes) {
  std::vector<LayerShared> shared(c.layers().size());
  for (std::size_t l = 0; l < c.layers().size(); ++l) {
    shared[l].dcms = compute_param_gradients(c.layers()[l].gauss);
    const bool needs_g = l > 0 || c.order() == LayerOrder::KerrFirst;
    if (needs_g) {
      shared[l].g = full_g_tensor(passes.front().layers[l].cms, c.cutoff(), c.modes());
    }
  }
  return shared;
}

std::vector<Complex> pair_backward(const Circuit& c, std::span<const LayerShared> shared,
                                   const ForwardPass& pass, UpstreamCotangent upstream) {
  const std::size_t per_layer = c.parameters_per_layer();
  const int M = c.modes();
  std::vector<Complex> grad(per_layer * c.layers().size());
  for (std::size_t l = c.layers().size(); l-- > 0;) {
    const Layer& layer = c.layers()[l];
    const LayerTrace& trace = pass.layers[l];
    Complex* out = grad.data() + l * per_layer;
    auto gaussian_step = [&](const UpstreamCotangent& u, bool propagate) {
      StateGradient sg = d_evolve(trace.cms, shared[l].dcms, trace.gauss_input, trace.gauss.workspace);
      std::vector<ParamCotangent> pc = wirtinger_pair(u, sg);
      for (std::size_t i = 0; i < pc.size(); ++i) out[i] = pc[i].value;
      if (propagate) return backprop_to_input(*shared[l].g, u);
      return UpstreamCotangent{};
    };
    auto kerr_step = [&](const UpstreamCotangent& u) {
      KerrBackward kb = kerr_gradients(layer.kappa, trace.kerr_input, u);
      for (int i = 0; i < M; ++i) out[per_layer - M + i] = kb.dl_dkappa[i];
      return std::move(kb.downstream);
    };
    if (c.order() == LayerOrder::GaussianFirst) {
      upstream = kerr_step(upstream);
      upstream = gaussian_step(upstream, l > 0);
    } else {
      upstream = gaussian_step(upstream, true);
      upstream = kerr_step(upstream);
    }
  }
  return grad;
}

}  // namespace

Circuit::Circuit(int modes, int cutoff, std::vector<Layer> layers, LayerOrder order)
    : modes_(modes), cutoff_(cutoff), layers_(std::move(layers)), order_(order) {
  validate();
}

Circuit Circuit::identity(int modes, int cutoff, int layers, LayerOrder order) {
  if (layers < 1) throw std::invalid_argument("Circuit: at least one layer required");
  std::vector<Layer> ls(layers, Layer{GaussianParams::identity(modes), std::vector<double>(modes, 0.0)});
  return Circuit(modes, cutoff, std::move(ls), order);
}

void Circuit::validate() const {
  if (modes_ < 1 || modes_ > 2) throw std::invalid_argument("Circuit: modes must be 1 or 2");
  if (cutoff_ < 1) throw std::invalid_argument("Circuit: cutoff must be positive");
  if (layers_.empty()) throw std::invalid_argument("Circuit: at least one layer required");
  for (const Layer& l : layers_) {
    if (l.gauss.modes != modes_ || l.kappa.size() != static_cast<std::size_t>(modes_)) {
      throw std::invalid_argument("Circuit: every layer must act on " + std::to_string(modes_) +
                                  " mode(s)");
    }
    l.gauss.validate();
  }
}

std::size_t Circuit::parameters_per_layer() const {
  return gaussian_parameter_ids(modes_).size() + static_cast<std::size_t>(modes_);
}

ParameterVector Circuit::parameters() const {
  ParameterVector p;
  const auto ids = gaussian_parameter_ids(modes_);
  for (const Layer& l : layers_) {
    const GaussianParams& g = l.gauss;
    for (ParamId id : ids) {
      if (id.kind == ParamKind::Gamma) {
        p.values.push_back(g.gamma[id.mode]);
        p.kinds.push_back(CoordKind::Complex);
      } else {
        p.values.push_back(*real_coordinate(g, id));
        p.kinds.push_back(id.kind == ParamKind::R ? CoordKind::Magnitude : CoordKind::Real);
      }
    }
    for (double k : l.kappa) {
      p.values.push_back(k);
      p.kinds.push_back(CoordKind::Real);
    }
  }
  return p;
}

void Circuit::set_parameters(const ParameterVector& p) {
  if (p.size() != parameters_per_layer() * layers_.size()) {
    throw std::invalid_argument("Circuit::set_parameters: wrong parameter count");
  }
  const auto ids = gaussian_parameter_ids(modes_);
  std::size_t i = 0;
  for (Layer& l : layers_) {
    for (ParamId id : ids) {
      if (id.kind == ParamKind::Gamma) {
        l.gauss.gamma[id.mode] = p.values[i++];
      } else {
        *real_coordinate(l.gauss, id) = p.values[i++].real();
      }
    }
    for (double& k : l.kappa) k = p.values[i++].real();
  }
  validate();
}

void TrainingSet::validate(int modes, int cutoff) const {
  if (pairs.empty()) throw std::invalid_argument("TrainingSet: no pairs");
  for (const TrainingPair& pair : pairs) {
    if (pair.input.modes() != modes || pair.input.cutoff() != cutoff ||
        pair.target.modes() != modes || pair.target.cutoff() != cutoff) {
      throw std::invalid_argument("TrainingSet: state shape does not match the circuit");
    }
    if (std::abs(pair.target.norm_squared() - 1.0) > 1e-12) {
      throw std::invalid_argument("TrainingSet: targets must be normalized");
    }
  }
}

ForwardPass forward(const Circuit& c, const FockState& psi) {
  if (psi.modes() != c.modes() || psi.cutoff() != c.cutoff()) {
    throw std::invalid_argument("forward: state shape does not match the circuit");
  }
  ForwardPass pass;
  pass.parameter_snapshot = c.parameters().values;
  FockState state = psi;
  for (const Layer& layer : c.layers()) {
    LayerTrace trace;
    trace.cms = compute_cmusigma(layer.gauss);
    if (c.order() == LayerOrder::GaussianFirst) {
      trace.gauss_input = state;
      trace.gauss = evolve(trace.cms, state);
      trace.kerr_input = trace.gauss.state;
      state = apply_kerr(layer.kappa, trace.kerr_input);
    } else {
      trace.kerr_input = state;
      trace.gauss_input = apply_kerr(layer.kappa, state);
      trace.gauss = evolve(trace.cms, trace.gauss_input);
      state = trace.gauss.state;
    }
    pass.layers.push_back(std::move(trace));
  }
  pass.output = std::move(state);
  return pass;
}

double loss_fidelity(const Circuit& c, const TrainingSet& ts) {
  ts.validate(c.modes(), c.cutoff());
  double acc = 0.0;
  for (const TrainingPair& pair : ts.pairs) {
    acc += std::norm(inner(pair.target, forward(c, pair.input).output));
  }
  return 1.0 - acc / static_cast<double>(ts.pairs.size());
}

DivergentLossError::DivergentLossError(std::size_t pair, double probability)
    : std::runtime_error("KL term diverges: pair " + std::to_string(pair) + " has probability " +
                         std::to_string(probability)),
      pair_(pair) {}

double loss_kl_uniform(const Circuit& c, const TrainingSet& ts) {
  ts.validate(c.modes(), c.cutoff());
  double acc = 0.0;
  for (std::size_t s = 0; s < ts.pairs.size(); ++s) {
    double p = std::norm(inner(ts.pairs[s].target, forward(c, ts.pairs[s].input).output));
    if (!(p > kKlProbabilityFloor)) throw DivergentLossError(s, p);
    acc -= std::log(p);
  }
  return acc;
}

namespace {

struct Seeds {
  double fidelity_loss = 0.0;
  double kl = 0.0;
  std::vector<double> fidelities;
  std::vector<double> normalized;
  std::vector<UpstreamCotangent> upstream;
};

Seeds seed_cotangents(const TrainingSet& ts, std::span<const ForwardPass> passes,
                      LossOptions options) {
  const std::size_t S = ts.pairs.size();
  Seeds seeds;
  double fid_sum = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    const FockState& target = ts.pairs[s].target;
    const FockState& out = passes[s].output;
    const Complex overlap = inner(target, out);
    const double p = std::norm(overlap);
    const double out_norm = out.norm_squared();
    seeds.fidelities.push_back(p);
    seeds.normalized.push_back(out_norm > 0.0 ? p / out_norm : 0.0);
    fid_sum += p;
    // d|<t|psi>|^2 / d psi* = <t|psi> t
    Complex coef = -overlap / static_cast<double>(S);
    if (options.kl_weight != 0.0) {
      if (!(p > kKlProbabilityFloor)) throw DivergentLossError(s, p);
      seeds.kl -= std::log(p);
      coef -= options.kl_weight * overlap / p;
    }
    FockState u = target;
    for (Complex& z : u.amplitudes()) z *= coef;
    seeds.upstream.push_back({std::move(u)});
  }
  seeds.fidelity_loss = 1.0 - fid_sum / static_cast<double>(S);
  return seeds;
}

std::vector<Complex> reduce_backward(const Circuit& c, std::span<const ForwardPass> passes,
                                     std::vector<UpstreamCotangent> upstream, int threads) {
  const std::vector<LayerShared> shared = prepare_backward(c, passes);
  std::vector<std::vector<Complex>> per_pair(passes.size());
  for_each_pair(passes.size(), threads, [&](std::size_t s) {
    per_pair[s] = pair_backward(c, shared, passes[s], std::move(upstream[s]));
  });
  std::vector<Complex> grad(per_pair.front().size());
  for (const auto& g : per_pair) {
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
  }
  return grad;
}

}  // namespace

std::vector<Complex> backward(const Circuit& c, const TrainingSet& ts,
                              std::span<const ForwardPass> passes, LossOptions options) {
  ts.validate(c.modes(), c.cutoff());
  if (passes.size() != ts.pairs.size()) {
    throw std::invalid_argument("backward: one forward pass per training pair required");
  }
  const std::vector<Complex> current = c.parameters().values;
  for (const ForwardPass& pass : passes) {
    if (pass.parameter_snapshot != current || pass.layers.size() != c.layers().size()) {
      throw std::invalid_argument("backward: forward pass is stale");
    }
  }
  Seeds seeds = seed_cotangents(ts, passes, options);
  return reduce_backward(c, passes, std::move(seeds.upstream), 1);
}

Evaluation evaluate(const Circuit& c, const TrainingSet& ts, LossOptions options, int threads) {
  ts.validate(c.modes(), c.cutoff());
  std::vector<ForwardPass> passes(ts.pairs.size());
  for_each_pair(ts.pairs.size(), threads,
                [&](std::size_t s) { passes[s] = forward(c, ts.pairs[s].input); });
  Seeds seeds = seed_cotangents(ts, passes, options);
  Evaluation ev;
  ev.fidelity_loss = seeds.fidelity_loss;
  ev.kl = seeds.kl;
  ev.loss = seeds.fidelity_loss + options.kl_weight * seeds.kl;
  ev.fidelities = std::move(seeds.fidelities);
  ev.normalized_fidelities = std::move(seeds.normalized);
  ev.gradient = reduce_backward(c, passes, std::move(seeds.upstream), threads);
  return ev;
}

int threads_from_env() {
  const char* env = std::getenv("FOCKFLOW_THREADS");
  if (!env) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace fockflow
