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

#include <span>

#include "waves/optimizer.hpp"

namespace waves {

struct FoldedConfig {
  /// Shift epsilon of the folded operator (H - epsilon)^2.
  double epsilon_shift = 0.0;
  SwarmConfig swarm;

  void validate() const;
};

/// <psi|(H - epsilon)^2|psi> as the squared norm of (H - epsilon)|psi>.
double folded_objective(const StateVector& state, const ComplexMatrix& hamiltonian,
                        double epsilon_shift);

/// Folded-spectrum variational search on exp(i angle G_exc) A(theta)|ref>
/// using the swarm optimizer. The swarm starts from a Gaussian around
/// theta_init (width as in excited_init). Finite sampling is modeled as
/// additive Gaussian noise of variance Var[(H - epsilon)^2] / shots, with
/// shots taken from noise.tomography; parameter noise applies as usual.
/// Fidelity follows the subspace with the largest final overlap unless a
/// target is given.
SearchResult run_folded_search(const ComplexMatrix& hamiltonian, const Ansatz& ansatz,
                               std::span<const double> theta_init,
                               const ExcitationOp& excitation, const FoldedConfig& config,
                               const NoiseModel& noise, const SpectrumOracle* oracle = nullptr,
                               std::optional<std::size_t> target_subspace = std::nullopt);

/// Ground search that minimizes the energy alone (a = 0, b = 1).
SearchResult run_energy_only_search(const HermitianEigensystem& hamiltonian,
                                    const Ansatz& ansatz, double t, const SwarmConfig& config,
                                    const NoiseModel& noise,
                                    const SpectrumOracle* oracle = nullptr);

}  // namespace waves
