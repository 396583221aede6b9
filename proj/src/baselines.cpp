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

#include "waves/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace waves {

void FoldedConfig::validate() const {
  if (!std::isfinite(epsilon_shift)) throw DomainError("folded shift must be finite");
  swarm.validate();
}

double folded_objective(const StateVector& state, const ComplexMatrix& hamiltonian,
                        double epsilon_shift) {
  if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() != state.amplitudes().size()) {
    throw DimensionError("Hamiltonian and state dimensions differ");
  }
  const ComplexVector shifted =
      hamiltonian * state.amplitudes() - epsilon_shift * state.amplitudes();
  return shifted.squaredNorm();
}

SearchResult run_folded_search(const ComplexMatrix& hamiltonian, const Ansatz& ansatz,
                               std::span<const double> theta_init,
                               const ExcitationOp& excitation, const FoldedConfig& config,
                               const NoiseModel& noise, const SpectrumOracle* oracle,
                               std::optional<std::size_t> target_subspace) {
  config.validate();
  if (theta_init.size() != ansatz.num_parameters()) {
    throw DimensionError("theta_init length does not match the ansatz");
  }
  if (static_cast<std::size_t>(hamiltonian.rows()) != ansatz.reference().dimension()) {
    throw DimensionError("Hamiltonian and ansatz registers differ");
  }
  SwarmConfig cfg = config.swarm;
  cfg.adaptive = false;
  cfg.init = excited_init(theta_init, config.swarm.init);
  const ComplexMatrix exc = excitation.unitary();
  const Eigen::Index dim = hamiltonian.rows();
  const ComplexMatrix shifted =
      hamiltonian - config.epsilon_shift * ComplexMatrix::Identity(dim, dim);
  const double eps = config.epsilon_shift;

  const Objective f = [&](std::span<const double> theta, const ObjectiveWeights&, Rng& rng) {
    const StateVector trial =
        apply_unitary(prepare(ansatz, theta, noise.parameters, &rng), exc);
    ParticleEval e;
    e.value = folded_objective(trial, hamiltonian, eps);
    if (noise.tomography) {
      const ComplexVector v = shifted * trial.amplitudes();
      const ComplexVector w = shifted * v;
      // <(H - eps)^4> = |(H - eps)^2 psi|^2.
      const double var = std::max(w.squaredNorm() - e.value * e.value, 0.0);
      const double sd = std::sqrt(var / noise.tomography->shots_per_basis);
      e.value += std::normal_distribution<double>(0.0, 1.0)(rng) * sd;
    }
    return e;
  };
  auto state_of = [&ansatz, &exc](std::span<const double> theta) {
    return apply_unitary(ansatz.prepare(theta), exc);
  };
  return run_swarm(f, ansatz.num_parameters(), cfg, state_of, oracle, target_subspace);
}

SearchResult run_energy_only_search(const HermitianEigensystem& hamiltonian,
                                    const Ansatz& ansatz, double t, const SwarmConfig& config,
                                    const NoiseModel& noise, const SpectrumOracle* oracle) {
  SwarmConfig cfg = config;
  cfg.weight_a = 0.0;
  cfg.weight_b = 1.0;
  cfg.adaptive = false;
  return run_ground_search(hamiltonian, ansatz, t, cfg, noise, oracle);
}

}  // namespace waves
