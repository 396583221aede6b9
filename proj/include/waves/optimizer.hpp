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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "waves/ansatz.hpp"
#include "waves/hamiltonians.hpp"
#include "waves/witness.hpp"

namespace waves {

/// Uniform box; a single bound is broadcast to every coordinate.
struct UniformInit {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Independent Gaussians per coordinate; a single std is broadcast.
struct GaussianInit {
  std::vector<double> mean;
  std::vector<double> std;
};

using SwarmInit = std::variant<UniformInit, GaussianInit>;

/// How survivors are weighted in the posterior refit. Linear gives
/// w_i = (max F - F_i) + 1e-12 over the survivors; Uniform weighs them
/// equally.
enum class SurvivorWeighting { Linear, Uniform };

struct SwarmConfig {
  int num_particles = 8;
  /// Defaults to ceil(sqrt(num_particles)).
  std::optional<int> survivors;
  double weight_a = 1.25;
  double weight_b = 1.0;
  bool adaptive = false;
  bool greedy = false;
  SurvivorWeighting weighting = SurvivorWeighting::Linear;
  double plateau_threshold = 1e-4;
  double dispersion_threshold = 1e-3;
  int max_steps = 100;
  SwarmInit init = UniformInit{{0.0}, {6.283185307179586}};
  std::uint64_t seed = 0;
  /// Threads used to evaluate particles within a step. Results do not depend
  /// on this value.
  int eval_threads = 1;

  int survivor_count() const;
  /// Throws DomainError listing the first violated invariant.
  void validate() const;
};

enum class ConvergenceReason { Dispersion, Plateau, MaxSteps };

std::string to_string(ConvergenceReason reason);

/// One objective evaluation. Energy and purity are NaN for objectives that do
/// not produce them.
struct ParticleEval {
  double value = 0.0;
  double energy = std::numeric_limits<double>::quiet_NaN();
  double purity = std::numeric_limits<double>::quiet_NaN();
};

/// Objective callback. The rng is a private stream for this (step, particle).
using Objective =
    std::function<ParticleEval(std::span<const double> theta, const ObjectiveWeights&, Rng&)>;

/// Raised when an objective evaluation fails; names the particle.
class ObjectiveError : public Error {
 public:
  ObjectiveError(std::size_t particle, const std::string& what)
      : Error("particle " + std::to_string(particle) + ": " + what), particle_(particle) {}
  std::size_t particle() const noexcept { return particle_; }

 private:
  std::size_t particle_;
};

struct SwarmState {
  int step = 0;
  std::vector<std::vector<double>> particles;
  /// Evaluations of the particle set scored in the last step, by index.
  std::vector<ParticleEval> evaluations;
  std::vector<double> posterior_mean;
  std::vector<double> posterior_std;
  double last_mean_fobj = std::numeric_limits<double>::quiet_NaN();
  double best_fobj = std::numeric_limits<double>::quiet_NaN();
  double survivor_mean_fobj = std::numeric_limits<double>::quiet_NaN();
  ObjectiveWeights weights;
  std::optional<ConvergenceReason> converged;

  std::size_t dimension() const noexcept { return posterior_mean.size(); }
  double max_std() const;
};

SwarmState init_swarm(const SwarmConfig& config, std::size_t dim, Rng& rng);

/// One iteration: score all particles, keep the best S, refit the Gaussian
/// and resample the rest. Particle i of step k draws its noise from
/// derive_seed(config.seed, k, i).
SwarmState swarm_step(const SwarmState& state, const Objective& objective,
                      const SwarmConfig& config, Rng& rng);

/// Gate and readout noise applied while scoring trial states.
struct NoiseModel {
  std::optional<NoisyTomography> tomography;
  std::optional<ParameterNoise> parameters;
  /// Random phase error on the controlled evolution, standard deviation in
  /// radians. Shifts the measured coherence phase only.
  double evolution_phase_sigma = 0.0;
};

/// Per-step record emitted to trace sinks.
struct StepRecord {
  int step = 0;
  double mean_fobj = 0.0;
  double best_fobj = 0.0;
  double max_std = 0.0;
  std::optional<double> fidelity;
};

struct SearchResult {
  std::vector<double> theta_best;
  std::vector<double> theta_uncertainty;
  std::vector<double> fobj_trace;
  std::vector<double> best_fobj_trace;
  std::vector<double> std_trace;
  /// Fidelity of the posterior-mean state with the target subspace, per step.
  std::vector<double> fidelity_trace;
  /// Fidelity of the posterior-mean state with every oracle subspace, per step.
  std::vector<std::vector<double>> subspace_fidelity_trace;
  std::optional<std::size_t> target_subspace;
  int steps = 0;
  ConvergenceReason convergence_reason = ConvergenceReason::MaxSteps;
  ObjectiveWeights final_weights;
  std::size_t objective_evaluations = 0;
  std::size_t purity_evaluations = 0;
  std::size_t energy_evaluations = 0;
  int num_particles = 0;

  std::size_t trial_states() const noexcept {
    return static_cast<std::size_t>(num_particles) * static_cast<std::size_t>(steps);
  }
  double final_fidelity() const { return fidelity_trace.empty() ? std::nan("") : fidelity_trace.back(); }
  /// Subspace with the largest final overlap.
  std::optional<std::size_t> collapsed_subspace() const;
  std::vector<StepRecord> records() const;
};

/// Runs the swarm with a caller-supplied objective and state map. The state
/// map turns a parameter vector into the noise-free state used for oracle
/// fidelities; pass an empty function to skip fidelity tracking.
SearchResult run_swarm(const Objective& objective, std::size_t dim, const SwarmConfig& config,
                       const std::function<StateVector(std::span<const double>)>& state_of,
                       const SpectrumOracle* oracle, std::optional<std::size_t> target_subspace);

/// Variational ground-state search minimizing b E - a P with the config's
/// weights. Fidelity is tracked against the oracle's lowest subspace.
SearchResult run_ground_search(const HermitianEigensystem& hamiltonian, const Ansatz& ansatz,
                               double t, const SwarmConfig& config, const NoiseModel& noise,
                               const SpectrumOracle* oracle = nullptr);

/// Excited-state refinement: minimizes -P on exp(i angle G_exc) A(theta)|ref>,
/// starting from a Gaussian swarm around theta_g. The Gaussian width comes
/// from config.init when it is a GaussianInit, otherwise max|theta_g|. When
/// target_subspace is empty the fidelity trace follows the subspace with the
/// largest final overlap.
SearchResult run_excited_search(const HermitianEigensystem& hamiltonian, const Ansatz& ansatz,
                                std::span<const double> theta_g, const ExcitationOp& excitation,
                                double t, const SwarmConfig& config, const NoiseModel& noise,
                                const SpectrumOracle* oracle = nullptr,
                                std::optional<std::size_t> target_subspace = std::nullopt);

/// The swarm initialization used by the excited search.
GaussianInit excited_init(std::span<const double> theta_g, const SwarmInit& configured);

/// Evaluates the WAVES objective for one trial state under the noise model.
ObjectiveValue noisy_objective(const StateVector& state, const HermitianEigensystem& hamiltonian,
                               double t, ObjectiveWeights weights, const NoiseModel& noise,
                               Rng& rng, bool need_energy);

}  // namespace waves
