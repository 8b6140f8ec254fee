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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockflow/circuit.hpp"
#include "fockflow/optim.hpp"

namespace fockflow {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "vacuum", "fock n", "noon n", "file PATH", or "gkp" (which needs a file).
struct StateSpec {
  enum class Kind { Fock, Noon, File, Gkp };
  Kind kind = Kind::Fock;
  int n = 0;
  std::filesystem::path path;

  static StateSpec parse(const std::string& text);
};

/// Builds the state described by spec. File states within 1e-6 of unit
/// norm are renormalized; anything else is a ConfigError.
FockState gen_target(const StateSpec& spec, int modes, int cutoff);

struct ExperimentConfig {
  std::string task = "experiment";
  int modes = 1;
  int cutoff = 10;
  int layers = 1;
  LayerOrder layer_order = LayerOrder::GaussianFirst;
  std::vector<StateSpec> inputs{StateSpec{}};
  std::vector<StateSpec> targets;
  std::vector<std::uint64_t> seeds{0};
  double fidelity_floor = 0.99;
  OptimizerConfig optimizer;

  /// Cross-field checks; throws ConfigError.
  void validate() const;
};

/// Reads the INI-style grammar documented in the README. Relative file
/// paths in state specs resolve against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& is, const std::filesystem::path& base_dir = {});

TrainingSet build_training_set(const ExperimentConfig& cfg);

struct SeedResult {
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  double fidelity = 0.0;             // mean over pairs
  double normalized_fidelity = 0.0;  // mean over pairs
  double wall_seconds = 0.0;
  std::vector<double> loss_trace;
};

struct ExperimentResult {
  std::vector<SeedResult> seeds;
  bool floor_met = false;
};

/// Trains once per seed. When out_dir is non-empty, writes per seed
/// seed_<k>_loss.csv, seed_<k>_final.state and seed_<k>_params.json, plus
/// summary.csv. stop_at_floor ends the run after the first seed that meets
/// the fidelity floor.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                 bool stop_at_floor = false, std::ostream* log = nullptr);

// Random draws shared by the benchmarks, the sweeps and the tests.
GaussianParams random_gaussian_params(int modes, std::mt19937_64& rng, double max_gamma = 0.5,
                                      double max_r = 0.5);
/// Complex Gaussian amplitudes over every basis state, normalized.
FockState random_state(int modes, int cutoff, std::mt19937_64& rng);

struct BenchRow {
  int cutoff = 0;
  std::string method;  // "direct" or "full"
  double median_seconds = 0.0;
  std::int64_t elements_computed = 0;
  bool skipped = false;
  double max_abs_diff = 0.0;  // direct vs full outputs
};

/// Times direct evolution against full tensor + contraction on the same
/// random parameters and state. Throws NumericalError if the two outputs
/// differ by more than 1e-10.
std::vector<BenchRow> bench_forward(int modes, const std::vector<int>& cutoffs, int repetitions,
                                    std::uint64_t seed = 0,
                                    std::size_t max_entries = kDefaultMaxGEntries);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

struct SweepRow {
  double r = 0.0;
  int trial = 0;
  double overlap_error = 0.0;
};

/// 1 - normalized overlap between the exact and the large-squeezing output
/// for the same `trials` random states at every r.
std::vector<SweepRow> sweep_large_r(const std::vector<double>& r_grid, int trials, int cutoff,
                                    std::uint64_t seed = 0);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace fockflow
