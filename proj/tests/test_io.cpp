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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fockflow/experiment.hpp"
#include "fockflow/state_file.hpp"

namespace fockflow {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("fockflow_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig parse(const std::string& text, const fs::path& base = {}) {
  std::istringstream is(text);
  return parse_config(is, base);
}

TEST(StateFile, BitExactRoundTrip) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const int modes = 1 + i % 2;
    FockState s = random_state(modes, 1 + i % 7, rng);
    std::stringstream ss;
    write_state(ss, s);
    FockState back = read_state(ss);
    ASSERT_TRUE(back.same_shape(s));
    for (std::size_t k = 0; k < s.size(); ++k) ASSERT_EQ(back[k], s[k]);
  }
}

TEST(StateFile, HeaderAndLines) {
  std::stringstream ss;
  write_state(ss, FockState::number(2, 1, 0));
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "fock-state v1 modes=2 cutoff=2");
  std::string line;
  int count = 0;
  while (std::getline(ss, line)) ++count;
  EXPECT_EQ(count, 4);
}

TEST(StateFile, RejectsMalformedInput) {
  for (const char* text : {"", "fock-state v2 modes=1 cutoff=2\n0 1 0\n1 0 0\n",
                           "fock-state v1 modes=3 cutoff=2\n",
                           "fock-state v1 modes=1 cutoff=2\n0 1 0\n",
                           "fock-state v1 modes=1 cutoff=2\n0 1 0\n1 x 0\n",
                           "fock-state v1 modes=1 cutoff=2\n0 1 0\n0 0 0\n"}) {
    std::istringstream is(text);
    EXPECT_THROW(read_state(is), StateFileError) << text;
  }
  EXPECT_THROW(load_state("/nonexistent/fockflow.state"), StateFileError);
}

TEST(StateSpecs, Parse) {
  EXPECT_EQ(StateSpec::parse("vacuum").n, 0);
  EXPECT_EQ(StateSpec::parse("fock 3").n, 3);
  EXPECT_EQ(StateSpec::parse("noon 5").kind, StateSpec::Kind::Noon);
  EXPECT_EQ(StateSpec::parse("file a b.state").path, fs::path("a b.state"));
  EXPECT_EQ(StateSpec::parse("gkp").kind, StateSpec::Kind::Gkp);
  EXPECT_THROW(StateSpec::parse("fock"), ConfigError);
  EXPECT_THROW(StateSpec::parse("cat 2"), ConfigError);
  EXPECT_THROW(StateSpec::parse("file"), ConfigError);
}

TEST(GenTarget, Builtins) {
  FockState f = gen_target(StateSpec::parse("fock 1"), 1, 100);
  EXPECT_EQ(f[1], Complex(1.0, 0.0));
  FockState noon = gen_target(StateSpec::parse("noon 5"), 2, 10);
  EXPECT_NEAR(std::abs(noon(5, 0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(noon(0, 5)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(noon.norm_squared(), 1.0, 1e-15);
  EXPECT_THROW(gen_target(StateSpec::parse("noon 5"), 1, 10), ConfigError);
  EXPECT_THROW(gen_target(StateSpec::parse("fock 10"), 1, 10), ConfigError);
  EXPECT_THROW(gen_target(StateSpec::parse("gkp"), 1, 50), ConfigError);
}

TEST(GenTarget, FileRenormalizesOnlyNearUnitNorm) {
  fs::path dir = scratch_dir("gen_target");
  FockState s(1, 3);
  s[0] = 0.6;
  s[2] = 0.8 * (1.0 + 1e-8);
  save_state(dir / "near.state", s);
  FockState t = gen_target(StateSpec::parse("file " + (dir / "near.state").string()), 1, 3);
  EXPECT_NEAR(t.norm_squared(), 1.0, 1e-15);
  s[2] = 0.5;
  save_state(dir / "far.state", s);
  EXPECT_THROW(gen_target(StateSpec::parse("file " + (dir / "far.state").string()), 1, 3), ConfigError);
  EXPECT_THROW(gen_target(StateSpec::parse("file " + (dir / "near.state").string()), 1, 4), ConfigError);
}

TEST(Config, ParsesFullGrammar) {
  ExperimentConfig cfg = parse(R"(
[experiment]
task = noon
modes = 2
cutoff = 10
layers = 20
steps = 3000
seeds = 1, 2, 3
target = noon 5
input = vacuum
fidelity_floor = 0.99
layer_order = kerr_first

[optimizer]
algorithm = plain-sgd
learning_rate = 0.02
kl_weight = 0.1
loss_floor = 1e-4
)");
  EXPECT_EQ(cfg.task, "noon");
  EXPECT_EQ(cfg.modes, 2);
  EXPECT_EQ(cfg.layers, 20);
  EXPECT_EQ(cfg.optimizer.steps, 3000);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(cfg.layer_order, LayerOrder::KerrFirst);
  EXPECT_EQ(cfg.optimizer.algorithm, Algorithm::PlainSgd);
  EXPECT_DOUBLE_EQ(cfg.optimizer.learning_rate, 0.02);
  EXPECT_DOUBLE_EQ(cfg.optimizer.loss.kl_weight, 0.1);
  EXPECT_DOUBLE_EQ(*cfg.optimizer.loss_floor, 1e-4);
  ASSERT_EQ(cfg.targets.size(), 1u);
  EXPECT_EQ(cfg.targets[0].kind, StateSpec::Kind::Noon);
}

TEST(Config, Defaults) {
  ExperimentConfig cfg = parse("[experiment]\ntarget = fock 1\n");
  EXPECT_EQ(cfg.modes, 1);
  EXPECT_EQ(cfg.optimizer.algorithm, Algorithm::AdaptiveMoments);
  EXPECT_DOUBLE_EQ(cfg.optimizer.learning_rate, 0.01);
  EXPECT_FALSE(cfg.optimizer.loss_floor.has_value());
  EXPECT_EQ(cfg.layer_order, LayerOrder::GaussianFirst);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse("[experiment]\nmodes = 1\ntarget = noon 2\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nmodes = 3\ntarget = fock 1\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nmodes = 1\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\ntarget = fock 1\nlayer_order = sideways\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\ntarget = fock 1\n[optimizer]\nalgorithm = newton\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\ntarget = fock 1\n[optimizer]\nlearning_rate = -1\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\ntarget = fock 1\nseeds = a\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\ntarget = fock 1; fock 2\ninput = vacuum; fock 1; fock 2\n"), ConfigError);
  EXPECT_THROW(parse("not an ini [\n"), ConfigError);
  ExperimentConfig gkp = parse("[experiment]\ncutoff = 50\ntarget = gkp\n");
  EXPECT_THROW(build_training_set(gkp), ConfigError);
}

TEST(Config, RelativeFilesResolveAgainstConfigDir) {
  fs::path dir = scratch_dir("config");
  save_state(dir / "t.state", FockState::number(4, 2));
  std::ofstream(dir / "exp.ini") << "[experiment]\ncutoff = 4\ntarget = file t.state\n";
  ExperimentConfig cfg = load_config(dir / "exp.ini");
  TrainingSet ts = build_training_set(cfg);
  EXPECT_EQ(ts.pairs[0].target[2], Complex(1.0, 0.0));
  EXPECT_THROW(load_config(dir / "missing.ini"), ConfigError);
}

TEST(Experiment, WritesArtifacts) {
  fs::path dir = scratch_dir("experiment");
  ExperimentConfig cfg = parse(R"(
[experiment]
cutoff = 6
layers = 2
steps = 20
seeds = 4, 5
target = fock 1
fidelity_floor = 0.0
)");
  std::ostringstream log;
  ExperimentResult res = run_experiment(cfg, dir, false, &log);
  ASSERT_EQ(res.seeds.size(), 2u);
  EXPECT_TRUE(res.floor_met);
  for (int k : {4, 5}) {
    EXPECT_TRUE(fs::exists(dir / ("seed_" + std::to_string(k) + "_loss.csv")));
    EXPECT_TRUE(fs::exists(dir / ("seed_" + std::to_string(k) + "_params.json")));
    FockState out = load_state(dir / ("seed_" + std::to_string(k) + "_final.state"));
    EXPECT_EQ(out.cutoff(), 6);
  }
  std::ifstream summary(dir / "summary.csv");
  std::string header;
  std::getline(summary, header);
  EXPECT_EQ(header, "seed,final_loss,fidelity,normalized_fidelity,wall_seconds");
  ExperimentResult stopped = run_experiment(cfg, {}, true);
  EXPECT_EQ(stopped.seeds.size(), 1u);
}

TEST(Bench, CountsAndAgreement) {
  std::vector<BenchRow> rows = bench_forward(1, {10}, 3, 1);
  ASSERT_EQ(rows.size(), 2u);
  for (const BenchRow& row : rows) {
    EXPECT_EQ(row.elements_computed, row.method == "direct" ? 55 : 100);
    EXPECT_LT(row.max_abs_diff, 1e-10);
    EXPECT_FALSE(row.skipped);
  }
  std::vector<BenchRow> two = bench_forward(2, {4, 12}, 1, 1, 10000);
  bool skipped_full = false;
  for (const BenchRow& row : two) {
    if (row.cutoff == 12 && row.method == "full") skipped_full = row.skipped;
  }
  EXPECT_TRUE(skipped_full);
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "N,method,median_seconds,elements_computed");
}

TEST(Sweep, ErrorShrinksWithSqueezing) {
  std::vector<SweepRow> rows = sweep_large_r({1.0, 3.0, 6.0}, 3, 20, 2);
  ASSERT_EQ(rows.size(), 9u);
  double mean[3] = {0, 0, 0};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].overlap_error, -1e-12);
    mean[i / 3] += rows[i].overlap_error / 3;
  }
  EXPECT_GT(mean[0], mean[1]);
  EXPECT_GT(mean[1], mean[2]);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "r,trial,overlap_error");
}

}  // namespace
}  // namespace fockflow
