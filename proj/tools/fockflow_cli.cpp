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

// fockflow: command-line front end.
//
//   fockflow train --config single_photon.ini [--seed K] [--out DIR]
//   fockflow evolve --config gate.ini [--in STATE] [--instrument] [--out DIR]
//   fockflow bench-forward --modes 2 --cutoffs 4,6,8,10 [--repetitions 20]
//   fockflow sweep-large-r --grid 1,1.5,2,2.5,3,6 [--trials 10] [--cutoff 50]
//   fockflow gen-target --target "noon 5" --modes 2 --cutoff 10
//
// Exit codes: 0 success, 1 fidelity floor not met, 2 configuration error,
// 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fockflow/evolve.hpp"
#include "fockflow/experiment.hpp"
#include "fockflow/state_file.hpp"

namespace fs = std::filesystem;
using namespace fockflow;

namespace {

constexpr int kExitFloorMissed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<double> number_list(const boost::property_tree::ptree& t, const std::string& key,
                                int expected, double fallback) {
  std::vector<double> out(expected, fallback);
  auto text = t.get_optional<std::string>(key);
  if (!text) return out;
  std::stringstream ss(*text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= expected) throw ConfigError("gate: too many values for '" + key + "'");
    try {
      out[i++] = std::stod(item);
    } catch (const std::exception&) {
      throw ConfigError("gate: bad number '" + item + "' for '" + key + "'");
    }
  }
  if (i != expected) throw ConfigError("gate: '" + key + "' needs " + std::to_string(expected) + " values");
  return out;
}

// [gate] section: modes, cutoff, gamma_re, gamma_im, r, delta, phi (comma
// lists, one value per mode), bs_pre / bs_post as "theta,varphi".
struct GateConfig {
  GaussianParams params;
  int cutoff = 10;
  std::string method = "direct";
};

GateConfig load_gate(const fs::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  const auto& g = tree.get_child("gate", boost::property_tree::ptree{});
  GateConfig cfg;
  try {
    cfg.params = GaussianParams::identity(g.get<int>("modes", 1));
    cfg.cutoff = g.get<int>("cutoff", 10);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("gate: ") + e.what());
  }
  cfg.method = g.get<std::string>("method", "direct");
  GaussianParams& p = cfg.params;
  const int M = p.modes;
  auto re = number_list(g, "gamma_re", M, 0.0);
  auto im = number_list(g, "gamma_im", M, 0.0);
  for (int i = 0; i < M; ++i) p.gamma[i] = {re[i], im[i]};
  p.r = number_list(g, "r", M, 0.0);
  p.delta = number_list(g, "delta", M, 0.0);
  p.phi = number_list(g, "phi", M, 0.0);
  if (M == 2) {
    auto pre = number_list(g, "bs_pre", 2, 0.0);
    auto post = number_list(g, "bs_post", 2, 0.0);
    p.bs_pre = BeamsplitterAngles{pre[0], pre[1]};
    p.bs_post = BeamsplitterAngles{post[0], post[1]};
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::ostream& open_output(const std::string& out_dir, const std::string& name, std::ofstream& file) {
  if (out_dir.empty()) return std::cout;
  fs::create_directories(out_dir);
  file.open(fs::path(out_dir) / name);
  if (!file) throw ConfigError("cannot write to " + out_dir);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fock-basis Gaussian evolution, gradients and circuit training"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_path, target_text, cutoffs_text = "4,6,8,10",
                                                          grid_text = "1,1.5,2,2.5,3,6";
  std::optional<std::uint64_t> seed;
  bool instrument = false;
  int modes = 1, cutoff = 10, repetitions = 20, trials = 10;

  auto* train_cmd = app.add_subcommand("train", "Train a layered Gaussian+Kerr circuit");
  train_cmd->add_option("--config", config_path, "Experiment config (INI)")->required();
  train_cmd->add_option("--seed", seed, "Run only this seed");
  train_cmd->add_option("--out", out_dir, "Output directory");

  auto* evolve_cmd = app.add_subcommand("evolve", "Apply one Gaussian gate to a state");
  evolve_cmd->add_option("--config", config_path, "Gate config (INI, [gate] section)")->required();
  evolve_cmd->add_option("--in", in_path, "Input state file (default: vacuum)");
  evolve_cmd->add_flag("--instrument", instrument, "Report operation counts");
  evolve_cmd->add_option("--out", out_dir, "Output directory");

  auto* bench_cmd = app.add_subcommand("bench-forward", "Direct evolution vs full tensor timings");
  bench_cmd->add_option("--modes", modes)->check(CLI::Range(1, 2));
  bench_cmd->add_option("--cutoffs", cutoffs_text, "Comma-separated cutoffs");
  bench_cmd->add_option("--repetitions", repetitions)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", seed);
  bench_cmd->add_option("--out", out_dir, "Output directory (stdout if omitted)");

  auto* sweep_cmd = app.add_subcommand("sweep-large-r", "Large-squeezing approximation error");
  sweep_cmd->add_option("--grid", grid_text, "Comma-separated squeezing magnitudes");
  sweep_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--cutoff", cutoff)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", seed);
  sweep_cmd->add_option("--out", out_dir, "Output directory (stdout if omitted)");

  auto* gen_cmd = app.add_subcommand("gen-target", "Write a target state file");
  gen_cmd->add_option("--target", target_text, "fock n | noon n | file PATH")->required();
  gen_cmd->add_option("--modes", modes)->check(CLI::Range(1, 2));
  gen_cmd->add_option("--cutoff", cutoff)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out", out_dir, "Output directory (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  auto split_numbers = [](const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("bad number '" + item + "'");
      }
    }
    return out;
  };

  try {
    if (*train_cmd) {
      ExperimentConfig cfg = load_config(config_path);
      if (seed) cfg.seeds = {*seed};
      ExperimentResult result = run_experiment(cfg, out_dir, false, &std::cerr);
      std::cout << "seed,final_loss,fidelity,normalized_fidelity,wall_seconds\n";
      for (const SeedResult& sr : result.seeds) {
        std::cout << sr.seed << ',' << sr.final_loss << ',' << sr.fidelity << ','
                  << sr.normalized_fidelity << ',' << sr.wall_seconds << '\n';
      }
      return result.floor_met ? 0 : kExitFloorMissed;
    }
    if (*evolve_cmd) {
      GateConfig gate = load_gate(config_path);
      const int M = gate.params.modes;
      FockState psi = in_path.empty() ? FockState::vacuum(M, gate.cutoff) : load_state(in_path);
      if (psi.modes() != M || psi.cutoff() != gate.cutoff) {
        throw ConfigError("input state does not match the gate's modes/cutoff");
      }
      OpCounter counter;
      FockState out;
      if (gate.method == "direct") {
        out = evolve(compute_cmusigma(gate.params), psi, instrument ? &counter : nullptr).state;
      } else if (gate.method == "full") {
        const CMuSigma cms = compute_cmusigma(gate.params);
        out = contract(full_g_tensor(cms, gate.cutoff, M, kDefaultMaxGEntries, instrument ? &counter : nullptr),
                       psi, instrument ? &counter : nullptr);
      } else if (gate.method == "large-r") {
        out = evolve_single_large_r(gate.params, psi);
      } else {
        throw ConfigError("gate: method must be direct, full or large-r");
      }
      std::ofstream file;
      write_state(open_output(out_dir, "evolved.state", file), out);
      if (instrument) {
        std::cerr << "elements_computed," << counter.elements_computed << "\nscalar_fmas,"
                  << counter.scalar_fmas << '\n';
      }
      return 0;
    }
    if (*bench_cmd) {
      std::vector<int> cutoffs;
      for (double v : split_numbers(cutoffs_text)) cutoffs.push_back(static_cast<int>(v));
      auto rows = bench_forward(modes, cutoffs, repetitions, seed.value_or(0));
      std::ofstream file;
      write_bench_csv(open_output(out_dir, "bench_forward.csv", file), rows);
      return 0;
    }
    if (*sweep_cmd) {
      auto rows = sweep_large_r(split_numbers(grid_text), trials, cutoff, seed.value_or(0));
      std::ofstream file;
      write_sweep_csv(open_output(out_dir, "sweep_large_r.csv", file), rows);
      return 0;
    }
    if (*gen_cmd) {
      FockState s = gen_target(StateSpec::parse(target_text), modes, cutoff);
      std::ofstream file;
      write_state(open_output(out_dir, "target.state", file), s);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StateFileError& e) {
    std::cerr << "state file error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
