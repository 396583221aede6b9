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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "waves/baselines.hpp"
#include "waves/phase_estimation.hpp"

namespace waves {

enum class Mode { Ground, Excited, Ipea, Rfpe, Folded, Spectrum, BenchNoise };

std::string to_string(Mode mode);
/// Accepts the subcommand spelling ("ground", "bench-noise", ...).
Mode parse_mode(const std::string& name);

struct HamiltonianConfig {
  enum class Kind { Exciton, File, Random } kind = Kind::Exciton;
  double alpha = 1.46;
  double beta = 0.037;
  double shift = 1.24;
  std::string path;
  int qubits = 2;
  int terms = 3;
  double scale = 1.0;
  std::uint64_t seed = 1;
  double degeneracy_tolerance = 1e-9;
};

struct AnsatzConfig {
  /// Empty means the built-in single-qubit rotation.
  std::string path;
  /// Ground-state parameters for the excited and folded stages. When empty
  /// the excited mode runs a ground search first.
  std::vector<double> theta_g;
};

struct ExcitationConfig {
  std::string path;
  /// Inline terms, ';' separated, e.g. "1.0 Z0".
  std::string terms;
  double angle = 1.5707963267948966;
  std::optional<std::size_t> target_subspace;
};

struct IpeaConfig {
  IpeaOptions options;
  /// "eigenstate" runs on oracle eigenvector `eigenstate`; "ground" runs a
  /// ground search first and estimates on its final state.
  std::string source = "eigenstate";
  std::size_t eigenstate = 0;
};

struct RfpeConfig {
  RfpeOptions options;
  int points = 512;
  double window = 5.0;
  /// Eigenvector indices and weights of the input mixture.
  std::vector<std::size_t> eigenstates = {0, 1};
  std::vector<double> populations = {0.5, 0.5};
  std::optional<double> prior_mean;
  std::optional<double> prior_std;
};

struct ExperimentConfig {
  Mode mode = Mode::Ground;
  HamiltonianConfig hamiltonian;
  AnsatzConfig ansatz;
  /// Empty selects choose_evolution_time.
  std::optional<double> evolution_time = 26.0;
  double target_phase = 1.5707963267948966;
  SwarmConfig swarm;
  ExcitationConfig excitation;
  NoiseModel noise;
  IpeaConfig ipea;
  RfpeConfig rfpe;
  double folded_epsilon = 0.0;
  std::vector<double> folded_theta_init;
  std::vector<double> bench_sigmas = {0.0, 0.012, 0.05, 0.1, 0.14};
  /// Apply each bench sigma to the controlled-evolution phase as well as to
  /// the ansatz parameters.
  bool bench_evolution_noise = true;
  std::optional<std::uint64_t> seed;
  int runs = 1;
  int workers = 1;
  std::filesystem::path output_dir = "out";

  /// Every violated invariant, one message each; empty when valid.
  std::vector<std::string> problems() const;
  /// Throws DomainError joining all problems.
  void validate() const;
  /// Effective settings as ordered "section.key" -> value pairs.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Reads an INI-style file with sections [hamiltonian], [ansatz],
/// [evolution], [swarm], [excitation], [noise], [ipea], [rfpe], [folded],
/// [bench] and [run]. Unknown keys are rejected. The mode is left untouched
/// (the subcommand chooses it).
ExperimentConfig parse_experiment_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        ExperimentConfig base = {});

/// A CSV table with a fixed column order.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Outcome of one seeded run.
struct RunOutcome {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  Table trace;
  /// Per-step (or per-epoch) series aggregated across runs.
  std::vector<double> series;
  std::map<std::string, double> scalars;
  std::map<std::string, std::string> labels;
  std::vector<double> subspace_fidelities;
  std::optional<std::size_t> collapsed_subspace;
  std::vector<std::string> failed_checks;
};

struct BatchResult {
  std::vector<RunOutcome> runs;
  /// step, mean, median, p16.25, p83.75, count
  Table aggregate;
  /// subspace, eigenvalue, count, frequency
  Table collapse;
  std::vector<double> eigenvalues;
  std::size_t successes = 0;
  bool checks_passed = true;
};

/// Prepared problem shared by every run of a batch.
struct Problem {
  PauliSum hamiltonian;
  SpectrumOracle oracle;
  ComplexMatrix dense;
  Ansatz ansatz;
  ExcitationOp excitation;
  double t = 0.0;
};

Problem build_problem(const ExperimentConfig& config);

/// Executes one run of the configured mode with the given run seed.
RunOutcome run_once(const ExperimentConfig& config, const Problem& problem, std::size_t index,
                    std::uint64_t seed);

/// Runs config.runs independent runs with seeds derive_seed(seed, index) on
/// config.workers threads; results are ordered by run index regardless of
/// scheduling.
BatchResult run_batch(const ExperimentConfig& config);

/// 100 q-th percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

/// Writes summary.json, trace CSVs (one per run, plus aggregate and
/// collapse tables) under config.output_dir. Returns the written paths.
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const BatchResult& batch, double wall_seconds);

std::string to_csv(const Table& table, const std::vector<std::pair<std::string, std::string>>& echo,
                   std::uint64_t seed);

}  // namespace waves
