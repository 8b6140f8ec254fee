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

#include "fockflow/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "fockflow/state_file.hpp"

namespace fockflow {
namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& text, const char* separators) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(separators));
  for (auto& p : parts) boost::trim(p);
  parts.erase(std::remove(parts.begin(), parts.end(), std::string{}), parts.end());
  return parts;
}

template <typename T>
T get_or(const pt::ptree& tree, const std::string& key, T fallback) {
  try {
    return tree.get<T>(key, fallback);
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError("config: bad value for '" + key + "'");
  }
}

nlohmann::json layers_to_json(const Circuit& c) {
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : c.layers()) {
    nlohmann::json j;
    nlohmann::json gamma = nlohmann::json::array();
    for (Complex g : l.gauss.gamma) gamma.push_back({g.real(), g.imag()});
    j["gamma"] = gamma;
    j["r"] = l.gauss.r;
    j["delta"] = l.gauss.delta;
    j["phi"] = l.gauss.phi;
    if (l.gauss.bs_pre) j["bs_pre"] = {{"theta", l.gauss.bs_pre->theta}, {"varphi", l.gauss.bs_pre->varphi}};
    if (l.gauss.bs_post) {
      j["bs_post"] = {{"theta", l.gauss.bs_post->theta}, {"varphi", l.gauss.bs_post->varphi}};
    }
    j["kappa"] = l.kappa;
    layers.push_back(j);
  }
  return layers;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

StateSpec StateSpec::parse(const std::string& text) {
  std::istringstream is(text);
  std::string kind;
  is >> kind;
  StateSpec spec;
  if (kind == "vacuum") {
    spec.kind = Kind::Fock;
    spec.n = 0;
    return spec;
  }
  if (kind == "file") {
    std::string rest;
    std::getline(is, rest);
    boost::trim(rest);
    if (rest.empty()) throw ConfigError("state spec 'file' needs a path");
    spec.kind = Kind::File;
    spec.path = rest;
    return spec;
  }
  if (kind == "gkp") {
    spec.kind = Kind::Gkp;
    return spec;
  }
  if (kind == "fock" || kind == "noon") {
    spec.kind = kind == "fock" ? Kind::Fock : Kind::Noon;
    if (!(is >> spec.n) || spec.n < 0) throw ConfigError("state spec '" + text + "' needs n >= 0");
    return spec;
  }
  throw ConfigError("unknown state spec '" + text + "' (expected vacuum, fock n, noon n, file PATH)");
}

FockState gen_target(const StateSpec& spec, int modes, int cutoff) {
  switch (spec.kind) {
    case StateSpec::Kind::Fock: {
      if (spec.n >= cutoff) throw ConfigError("fock target: n must be below the cutoff");
      if (modes == 1) return FockState::number(cutoff, spec.n);
      return FockState::number(cutoff, spec.n, 0);
    }
    case StateSpec::Kind::Noon: {
      if (modes != 2) throw ConfigError("noon target requires two modes");
      if (spec.n >= cutoff) throw ConfigError("noon target: n must be below the cutoff");
      if (spec.n == 0) return FockState::vacuum(2, cutoff);
      FockState s(2, cutoff);
      s(spec.n, 0) = std::numbers::sqrt2 / 2.0;
      s(0, spec.n) = std::numbers::sqrt2 / 2.0;
      return s;
    }
    case StateSpec::Kind::File: {
      FockState s;
      try {
        s = load_state(spec.path);
      } catch (const StateFileError& e) {
        throw ConfigError(e.what());
      }
      if (s.modes() != modes || s.cutoff() != cutoff) {
        throw ConfigError("state file " + spec.path.string() + " does not match modes/cutoff");
      }
      const double norm2 = s.norm_squared();
      if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6) {
        throw ConfigError("state file " + spec.path.string() + " is not normalized (norm^2 = " +
                          std::to_string(norm2) + ")");
      }
      const double scale = 1.0 / std::sqrt(norm2);
      for (Complex& z : s.amplitudes()) z *= scale;
      return s;
    }
    case StateSpec::Kind::Gkp:
      throw ConfigError(
          "gkp targets are not generated here: construct the hexagonal GKP state externally, "
          "save it in the fock-state v1 format and set 'target = file PATH'");
  }
  throw ConfigError("unreachable state spec");
}

void ExperimentConfig::validate() const {
  if (modes < 1 || modes > 2) throw ConfigError("config: modes must be 1 or 2");
  if (cutoff < 1) throw ConfigError("config: cutoff must be positive");
  if (layers < 1) throw ConfigError("config: layers must be >= 1");
  if (targets.empty()) throw ConfigError("config: at least one target is required");
  if (inputs.size() != 1 && inputs.size() != targets.size()) {
    throw ConfigError("config: give one input or one input per target");
  }
  if (seeds.empty()) throw ConfigError("config: at least one seed is required");
  for (const StateSpec& s : targets) {
    if (s.kind == StateSpec::Kind::Noon && modes != 2) {
      throw ConfigError("config: noon targets require modes = 2");
    }
  }
  try {
    optimizer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (optimizer.loss.kl_weight < 0.0) throw ConfigError("config: kl_weight must be >= 0");
}

ExperimentConfig parse_config(std::istream& is, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  const pt::ptree empty;
  const pt::ptree& ex = tree.get_child("experiment", empty);
  const pt::ptree& op = tree.get_child("optimizer", empty);

  cfg.task = get_or<std::string>(ex, "task", cfg.task);
  cfg.modes = get_or(ex, "modes", cfg.modes);
  cfg.cutoff = get_or(ex, "cutoff", cfg.cutoff);
  cfg.layers = get_or(ex, "layers", cfg.layers);
  cfg.fidelity_floor = get_or(ex, "fidelity_floor", cfg.fidelity_floor);

  const std::string order = get_or<std::string>(ex, "layer_order", "gaussian_first");
  if (order == "gaussian_first") {
    cfg.layer_order = LayerOrder::GaussianFirst;
  } else if (order == "kerr_first") {
    cfg.layer_order = LayerOrder::KerrFirst;
  } else {
    throw ConfigError("config: layer_order must be gaussian_first or kerr_first");
  }

  auto resolve = [&base_dir](StateSpec s) {
    if (s.kind == StateSpec::Kind::File && s.path.is_relative() && !base_dir.empty()) {
      s.path = base_dir / s.path;
    }
    return s;
  };
  cfg.inputs.clear();
  for (const auto& part : split_list(get_or<std::string>(ex, "input", "vacuum"), ";")) {
    cfg.inputs.push_back(resolve(StateSpec::parse(part)));
  }
  for (const auto& part : split_list(get_or<std::string>(ex, "target", ""), ";")) {
    cfg.targets.push_back(resolve(StateSpec::parse(part)));
  }
  cfg.seeds.clear();
  for (const auto& part : split_list(get_or<std::string>(ex, "seeds", "0"), ",")) {
    try {
      cfg.seeds.push_back(std::stoull(part));
    } catch (const std::exception&) {
      throw ConfigError("config: bad seed '" + part + "'");
    }
  }

  OptimizerConfig& o = cfg.optimizer;
  const std::string algo = get_or<std::string>(op, "algorithm", "adaptive-moments");
  if (algo == "adaptive-moments") {
    o.algorithm = Algorithm::AdaptiveMoments;
  } else if (algo == "plain-sgd") {
    o.algorithm = Algorithm::PlainSgd;
  } else {
    throw ConfigError("config: algorithm must be plain-sgd or adaptive-moments");
  }
  o.steps = get_or(ex, "steps", o.steps);
  o.learning_rate = get_or(op, "learning_rate", o.learning_rate);
  o.beta1 = get_or(op, "beta1", o.beta1);
  o.beta2 = get_or(op, "beta2", o.beta2);
  o.epsilon_hat = get_or(op, "epsilon_hat", o.epsilon_hat);
  o.init_scale = get_or(op, "init_scale", o.init_scale);
  o.loss.kl_weight = get_or(op, "kl_weight", o.loss.kl_weight);
  if (auto floor = op.get_optional<double>("loss_floor")) o.loss_floor = *floor;
  o.threads = threads_from_env();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  return parse_config(is, path.parent_path());
}

TrainingSet build_training_set(const ExperimentConfig& cfg) {
  cfg.validate();
  TrainingSet ts;
  for (std::size_t s = 0; s < cfg.targets.size(); ++s) {
    const StateSpec& in = cfg.inputs.size() == 1 ? cfg.inputs.front() : cfg.inputs[s];
    ts.pairs.push_back({gen_target(in, cfg.modes, cfg.cutoff),
                        gen_target(cfg.targets[s], cfg.modes, cfg.cutoff)});
  }
  return ts;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                bool stop_at_floor, std::ostream* log) {
  const TrainingSet ts = build_training_set(cfg);
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  ExperimentResult result;
  for (std::uint64_t seed : cfg.seeds) {
    Circuit circuit = Circuit::identity(cfg.modes, cfg.cutoff, cfg.layers, cfg.layer_order);
    OptimizerConfig oc = cfg.optimizer;
    oc.seed = seed;
    TrainReport report = train(circuit, ts, oc);

    SeedResult sr;
    sr.seed = seed;
    sr.final_loss = report.final_loss;
    for (std::size_t s = 0; s < ts.pairs.size(); ++s) {
      sr.fidelity += report.fidelities[s] / static_cast<double>(ts.pairs.size());
      sr.normalized_fidelity += report.normalized_fidelities[s] / static_cast<double>(ts.pairs.size());
    }
    sr.wall_seconds = report.wall_seconds;
    sr.loss_trace = report.loss_trace;

    if (!out_dir.empty()) {
      const std::string stem = "seed_" + std::to_string(seed);
      std::ofstream trace(out_dir / (stem + "_loss.csv"));
      trace << "step,loss\n";
      char buf[64];
      for (std::size_t i = 0; i < report.loss_trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, report.loss_trace[i]);
        trace << buf;
      }
      save_state(out_dir / (stem + "_final.state"), forward(circuit, ts.pairs.front().input).output);
      nlohmann::json params;
      params["task"] = cfg.task;
      params["seed"] = seed;
      params["modes"] = cfg.modes;
      params["cutoff"] = cfg.cutoff;
      params["layer_order"] =
          cfg.layer_order == LayerOrder::GaussianFirst ? "gaussian_first" : "kerr_first";
      params["layers"] = layers_to_json(circuit);
      std::ofstream(out_dir / (stem + "_params.json")) << params.dump(2) << '\n';
    }
    if (log) {
      *log << cfg.task << " seed " << seed << ": loss " << sr.final_loss << ", fidelity "
           << sr.fidelity << ", normalized " << sr.normalized_fidelity << ", "
           << sr.wall_seconds << " s\n";
    }
    const bool met = sr.fidelity >= cfg.fidelity_floor;
    result.floor_met = result.floor_met || met;
    result.seeds.push_back(std::move(sr));
    if (met && stop_at_floor) break;
  }

  if (!out_dir.empty()) {
    std::ofstream summary(out_dir / "summary.csv");
    summary << "seed,final_loss,fidelity,normalized_fidelity,wall_seconds\n";
    char buf[160];
    for (const SeedResult& sr : result.seeds) {
      std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.6f\n",
                    static_cast<unsigned long long>(sr.seed), sr.final_loss, sr.fidelity,
                    sr.normalized_fidelity, sr.wall_seconds);
      summary << buf;
    }
  }
  return result;
}

GaussianParams random_gaussian_params(int modes, std::mt19937_64& rng, double max_gamma,
                                      double max_r) {
  std::uniform_real_distribution<double> sym(-max_gamma, max_gamma);
  std::uniform_real_distribution<double> mag(0.0, max_r);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  GaussianParams p = GaussianParams::identity(modes);
  for (int i = 0; i < modes; ++i) {
    double re = sym(rng);
    double im = sym(rng);
    p.gamma[i] = {re, im};
    p.r[i] = mag(rng);
    p.delta[i] = angle(rng);
    p.phi[i] = angle(rng);
  }
  if (modes == 2) {
    for (auto* bs : {&*p.bs_pre, &*p.bs_post}) {
      bs->theta = angle(rng);
      bs->varphi = angle(rng);
    }
  }
  return p;
}

FockState random_state(int modes, int cutoff, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  FockState s(modes, cutoff);
  for (Complex& z : s.amplitudes()) {
    double re = normal(rng);
    double im = normal(rng);
    z = {re, im};
  }
  const double scale = 1.0 / std::sqrt(s.norm_squared());
  for (Complex& z : s.amplitudes()) z *= scale;
  return s;
}

std::vector<BenchRow> bench_forward(int modes, const std::vector<int>& cutoffs, int repetitions,
                                    std::uint64_t seed, std::size_t max_entries) {
  if (repetitions < 1) throw std::invalid_argument("bench_forward: repetitions must be >= 1");
  using clock = std::chrono::steady_clock;
  std::mt19937_64 rng(seed);
  std::vector<BenchRow> rows;
  for (int N : cutoffs) {
    const CMuSigma cms = compute_cmusigma(random_gaussian_params(modes, rng));
    const FockState psi = random_state(modes, N, rng);

    OpCounter direct_count;
    FockState direct_out = evolve(cms, psi, &direct_count).state;
    std::vector<double> direct_times;
    for (int rep = 0; rep < repetitions; ++rep) {
      const auto t0 = clock::now();
      Evolution e = evolve(cms, psi);
      direct_times.push_back(std::chrono::duration<double>(clock::now() - t0).count());
      if (e.state[0] != direct_out[0]) throw NumericalError("bench_forward: non-deterministic output");
    }
    BenchRow direct{N, "direct", median(direct_times), direct_count.elements_computed};

    BenchRow full{N, "full", 0.0, 0};
    try {
      GTensor g = full_g_tensor(cms, N, modes, max_entries);
      full.elements_computed = static_cast<std::int64_t>(g.data.size());
      FockState full_out = contract(g, psi);
      double diff = 0.0;
      for (std::size_t i = 0; i < psi.size(); ++i) diff = std::max(diff, std::abs(full_out[i] - direct_out[i]));
      if (diff > 1e-10) {
        throw NumericalError("bench_forward: direct and full outputs differ by " + std::to_string(diff));
      }
      direct.max_abs_diff = full.max_abs_diff = diff;
      std::vector<double> full_times;
      for (int rep = 0; rep < repetitions; ++rep) {
        const auto t0 = clock::now();
        FockState out = contract(full_g_tensor(cms, N, modes, max_entries), psi);
        full_times.push_back(std::chrono::duration<double>(clock::now() - t0).count());
        if (out[0] != full_out[0]) throw NumericalError("bench_forward: non-deterministic output");
      }
      full.median_seconds = median(full_times);
    } catch (const MemoryBudgetError&) {
      full.skipped = true;
    }
    rows.push_back(direct);
    rows.push_back(full);
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "N,method,median_seconds,elements_computed\n";
  char buf[64];
  for (const BenchRow& r : rows) {
    os << r.cutoff << ',' << r.method << ',';
    if (r.skipped) {
      os << "skipped,skipped\n";
    } else {
      std::snprintf(buf, sizeof buf, "%.9g", r.median_seconds);
      os << buf << ',' << r.elements_computed << '\n';
    }
  }
}

std::vector<SweepRow> sweep_large_r(const std::vector<double>& r_grid, int trials, int cutoff,
                                    std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("sweep_large_r: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<FockState> states;
  for (int t = 0; t < trials; ++t) states.push_back(random_state(1, cutoff, rng));
  std::vector<SweepRow> rows;
  for (double r : r_grid) {
    GaussianParams p = GaussianParams::identity(1);
    p.r[0] = r;
    const CMuSigma cms = compute_cmusigma(p);
    for (int t = 0; t < trials; ++t) {
      const FockState exact = evolve_single(cms, states[t]).state;
      const FockState approx = evolve_single_large_r(p, states[t]);
      rows.push_back({r, t, 1.0 - normalized_overlap(exact, approx)});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "r,trial,overlap_error\n";
  char buf[96];
  for (const SweepRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", row.r, row.trial, row.overlap_error);
    os << buf;
  }
}

}  // namespace fockflow
