// Copyright 2026 The WAVES Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "json.hpp"
#include "waves/experiment.hpp"
#include "waves/rng.hpp"

namespace waves {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("waves_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Runs the CLI with stdout and stderr captured; returns the exit status.
int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(WAVES_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  return rows;
}

TEST(ModeNames, RoundTrip) {
  for (const char* name : {"ground", "excited", "ipea", "rfpe", "folded", "spectrum", "bench-noise"}) {
    EXPECT_EQ(to_string(parse_mode(name)), name);
  }
  EXPECT_THROW(parse_mode("vqe"), DomainError);
}

TEST(ConfigParse, ReadsEverySection) {
  const ExperimentConfig c = parse_experiment_config(R"([hamiltonian]
type = random
qubits = 3
terms = 5
scale = 0.5
seed = 4

[evolution]
time = auto

[swarm]
particles = 12
survivors = auto
weighting = uniform
init = gaussian
mean = 0.1, 0.2
std = 0.3

[excitation]
terms = 1.0 Z0; 0.5 X1
angle = 0.7
target = 2

[noise]
shots = 800
parameter_sigma = 0.14
phase_sigma = 0.05

[ipea]
bits = 16
shots = 101

[rfpe]
weight = 0.25
time_factor = 2.0
sample_phase = false
prior_std = 0.1

[run]
seed = 17
runs = 4
workers = 2
output = results
)");
  EXPECT_EQ(c.hamiltonian.kind, HamiltonianConfig::Kind::Random);
  EXPECT_EQ(c.hamiltonian.qubits, 3);
  EXPECT_EQ(c.hamiltonian.terms, 5);
  EXPECT_FALSE(c.evolution_time.has_value());
  EXPECT_EQ(c.swarm.num_particles, 12);
  EXPECT_EQ(c.swarm.survivor_count(), 4);
  EXPECT_EQ(c.swarm.weighting, SurvivorWeighting::Uniform);
  const auto& g = std::get<GaussianInit>(c.swarm.init);
  EXPECT_EQ(g.mean, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(g.std, (std::vector<double>{0.3}));
  EXPECT_EQ(c.excitation.terms, "1.0 Z0; 0.5 X1");
  EXPECT_DOUBLE_EQ(c.excitation.angle, 0.7);
  EXPECT_EQ(c.excitation.target_subspace, std::size_t{2});
  EXPECT_EQ(c.noise.tomography->shots_per_basis, 800);
  EXPECT_DOUBLE_EQ(c.noise.parameters->sigma, 0.14);
  EXPECT_DOUBLE_EQ(c.noise.evolution_phase_sigma, 0.05);
  EXPECT_EQ(c.ipea.options.m_bits, 16);
  EXPECT_EQ(c.ipea.options.shots_per_bit, 101);
  EXPECT_DOUBLE_EQ(c.rfpe.options.overlap_weight, 0.25);
  EXPECT_DOUBLE_EQ(c.rfpe.options.time_factor, 2.0);
  EXPECT_FALSE(c.rfpe.options.sample_phase);
  EXPECT_EQ(c.rfpe.prior_std, 0.1);
  EXPECT_EQ(c.seed, std::uint64_t{17});
  EXPECT_EQ(c.runs, 4);
  EXPECT_EQ(c.workers, 2);
  EXPECT_EQ(c.output_dir, fs::path("results"));
  EXPECT_TRUE(c.problems().empty());
}

TEST(ConfigParse, ShippedExampleIsValid) {
  const ExperimentConfig c = load_experiment_config(fs::path(WAVES_SOURCE_DIR) / "data" / "exciton_ground.ini");
  EXPECT_EQ(c.runs, 100);
  EXPECT_EQ(c.noise.tomography->shots_per_basis, 1500);
  EXPECT_TRUE(c.problems().empty());
}

TEST(ConfigParse, ReportsEveryBadKey) {
  try {
    parse_experiment_config("[swarm]\nparticles = many\ncolour = red\n[run]\nruns = -x\n");
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("swarm.particles"), std::string::npos) << what;
    EXPECT_NE(what.find("swarm.colour"), std::string::npos) << what;
    EXPECT_NE(what.find("run.runs"), std::string::npos) << what;
  }
  EXPECT_THROW(parse_experiment_config("[rfpe]\nsample_phase = maybe\n"), DomainError);
  EXPECT_THROW(parse_experiment_config("[swarm]\nweighting = cubic\n"), DomainError);
  EXPECT_THROW(parse_experiment_config("[run\nseed = 1\n"), ParseError);
}

TEST(ConfigParse, MissingFileNamesThePath) {
  try {
    load_experiment_config("/nonexistent/waves.ini");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/waves.ini"), std::string::npos);
  }
}

TEST(ConfigValidate, ListsAllProblems) {
  ExperimentConfig c;
  c.runs = 0;
  c.rfpe.options.time_factor = 0.0;
  c.ipea.options.m_bits = 0;
  const auto p = c.problems();
  EXPECT_EQ(p.size(), 4u);
  EXPECT_THROW(c.validate(), DomainError);
  c.seed = 3;
  c.runs = 1;
  c.rfpe.options.time_factor = 1.0;
  c.ipea.options.m_bits = 8;
  EXPECT_NO_THROW(c.validate());
}

TEST(ConfigEcho, CoversRfpeKeysAndOmitsWorkers) {
  ExperimentConfig c;
  c.seed = 1;
  c.workers = 8;
  bool tf = false;
  bool sp = false;
  for (const auto& [k, v] : c.echo()) {
    EXPECT_NE(k, "run.workers");
    if (k == "rfpe.time_factor") tf = true;
    if (k == "rfpe.sample_phase") sp = v == "true";
  }
  EXPECT_TRUE(tf);
  EXPECT_TRUE(sp);
}

TEST(Percentile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(percentile({3.0, 1.0, 2.0}, 50.0), 2.0);
  EXPECT_DOUBLE_EQ(percentile({1.0, 2.0}, 50.0), 1.5);
  EXPECT_DOUBLE_EQ(percentile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(percentile({1.0, 2.0, 3.0, 4.0, 5.0}, 100.0), 5.0);
  EXPECT_DOUBLE_EQ(percentile({7.0}, 16.25), 7.0);
}

TEST(RunBatch, SingleRunBandsCollapse) {
  ExperimentConfig c;
  c.mode = Mode::Ground;
  c.seed = 5;
  const BatchResult b = run_batch(c);
  ASSERT_EQ(b.runs.size(), 1u);
  ASSERT_TRUE(b.runs[0].ok);
  for (const auto& row : b.aggregate.rows) {
    EXPECT_EQ(row[1], row[2]);
    EXPECT_EQ(row[3], row[4]);
    EXPECT_EQ(row[1], row[3]);
  }
  const double trial = b.runs[0].scalars.at("trial_states");
  EXPECT_EQ(trial, b.runs[0].scalars.at("steps") * c.swarm.num_particles);
}

TEST(RunBatch, SeedsDeriveFromMasterAndResultsAreOrdered) {
  ExperimentConfig c;
  c.mode = Mode::Ground;
  c.seed = 5;
  c.runs = 4;
  c.workers = 3;
  const BatchResult b = run_batch(c);
  for (std::size_t i = 0; i < b.runs.size(); ++i) {
    EXPECT_EQ(b.runs[i].index, i);
    EXPECT_EQ(b.runs[i].seed, derive_seed(5, i));
  }
  EXPECT_EQ(b.successes, 4u);
}

TEST(RunBatch, RuntimeErrorsAreRecordedPerRun) {
  ExperimentConfig c;
  c.mode = Mode::Ipea;
  c.seed = 1;
  c.runs = 2;
  c.ipea.eigenstate = 9;
  const BatchResult b = run_batch(c);
  EXPECT_EQ(b.successes, 0u);
  EXPECT_FALSE(b.runs[0].ok);
  EXPECT_NE(b.runs[0].error.find("ipea.eigenstate"), std::string::npos);
  EXPECT_FALSE(b.checks_passed);
}

TEST(Cli, SpectrumOfExciton) {
  const fs::path dir = scratch("spectrum");
  ASSERT_EQ(cli("spectrum --seed 1 --out " + dir.string(), dir / "log.txt"), 0) << slurp(dir / "log.txt");
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(j["schema_version"], 1);
  ASSERT_EQ(j["eigenvalues"].size(), 2u);
  EXPECT_NEAR(j["eigenvalues"][0].get<double>(), 0.183, 1e-12);
  EXPECT_NEAR(j["eigenvalues"][1].get<double>(), 0.257, 1e-12);
  EXPECT_EQ(j["config"]["run.seed"], "1");
  const auto rows = csv_rows(slurp(dir / "spectrum_trace.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "index,eigenvalue,subspace");
}

TEST(Cli, IpeaBitsMatchTheArithmeticOracle) {
  const fs::path dir = scratch("ipea");
  spit(dir / "ipea.ini", "[ipea]\nbits = 32\nshots = 101\neigenstate = 1\n[run]\nseed = 3\n");
  ASSERT_EQ(cli("ipea --config " + (dir / "ipea.ini").string() + " --out " + dir.string(), dir / "log.txt"), 0)
      << slurp(dir / "log.txt");
  const auto rows = csv_rows(slurp(dir / "ipea_trace.csv"));
  ASSERT_EQ(rows.size(), 33u);
  EXPECT_EQ(rows[0], "position,bit,zeros,ones,expected");
  const auto expected = oracle::rounded_phase_bits(0.257, 26.0, 32);
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  std::string bits;
  for (int b : expected) bits += static_cast<char>('0' + b);
  EXPECT_EQ(j["runs"][0]["bits"], bits);
  EXPECT_EQ(j["runs"][0]["bits_match"], 1.0);
}

TEST(Cli, GroundTraceAndHeader) {
  const fs::path dir = scratch("ground");
  ASSERT_EQ(cli("ground --config " + std::string(WAVES_SOURCE_DIR) + "/data/exciton_ground.ini --runs 1 --out " +
                    dir.string(),
                dir / "log.txt"),
            0)
      << slurp(dir / "log.txt");
  const std::string text = slurp(dir / "ground_trace.csv");
  EXPECT_EQ(text.rfind("# waves trace; seed ", 0), 0u);
  EXPECT_NE(text.find("# run.seed = 2026"), std::string::npos);
  const auto rows = csv_rows(text);
  ASSERT_GE(rows.size(), 2u);
  EXPECT_LE(rows.size(), 101u);
  EXPECT_EQ(rows[0], "stage,step,mean_fobj,best_fobj,max_std,fidelity,trial_states");
}

TEST(Cli, ByteIdenticalAcrossRepeatsAndWorkerCounts) {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const std::string base = "excited --seed 99 --runs 6 ";
  ASSERT_EQ(cli(base + "--workers 1 --out " + a.string(), a / "log.txt"), 0) << slurp(a / "log.txt");
  ASSERT_EQ(cli(base + "--workers 3 --out " + b.string(), b / "log.txt"), 0) << slurp(b / "log.txt");
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path twin = b / fs::relative(entry.path(), a);
    ASSERT_TRUE(fs::exists(twin)) << twin;
    EXPECT_EQ(slurp(entry.path()), slurp(twin)) << entry.path();
    ++compared;
  }
  EXPECT_EQ(compared, 8);
}

TEST(Cli, MissingSeedFailsWithMessage) {
  const fs::path dir = scratch("noseed");
  EXPECT_EQ(cli("ground --out " + dir.string(), dir / "log.txt"), 2);
  EXPECT_NE(slurp(dir / "log.txt").find("run.seed is required"), std::string::npos);
}

TEST(Cli, ValidateReportsSpectrum) {
  const fs::path dir = scratch("validate");
  spit(dir / "h.txt", "qubits 2\n1.0 Z0 Z1\n");
  ASSERT_EQ(cli("validate " + (dir / "h.txt").string(), dir / "log.txt"), 0);
  const std::string out = slurp(dir / "log.txt");
  EXPECT_NE(out.find("qubits 2"), std::string::npos);
  EXPECT_NE(out.find("terms 1"), std::string::npos);
  EXPECT_NE(out.find("subspaces 2"), std::string::npos);
  spit(dir / "bad.txt", "qubits 2\n1.0 Q0\n");
  EXPECT_EQ(cli("validate " + (dir / "bad.txt").string(), dir / "log2.txt"), 2);
  EXPECT_NE(slurp(dir / "log2.txt").find("bad.txt"), std::string::npos);
}

}  // namespace
}  // namespace waves
