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

#include <optional>

#include <Eigen/Dense>

#include "waves/statevector.hpp"

namespace waves {

/// Reduced state of the Hadamard-test control qubit.
struct ControlQubitState {
  Eigen::Matrix2cd rho;

  /// Bloch components: rho = (I + x X + y Y + z Z) / 2.
  Eigen::Vector3d bloch() const;
  static ControlQubitState from_bloch(const Eigen::Vector3d& r);
};

/// Thrown when the control-qubit coherence vanishes and no phase can be read.
class PhaseUndefinedError : public Error {
 public:
  using Error::Error;
};

/// Control-qubit density after the controlled exp(-iHt) on |state>:
/// diagonal 1/2, rho(0,1) = (1/2) sum_j |alpha_j|^2 e^{+i lambda_j t}.
ControlQubitState control_density(const StateVector& state,
                                  const HermitianEigensystem& eigensystem, double t);

/// Same as above from precomputed eigenbasis populations |alpha_j|^2.
ControlQubitState control_density_from_populations(const RealVector& populations,
                                                   const RealVector& eigenvalues, double t);

double purity(const ControlQubitState& rho);
/// Natural-log von Neumann entropy; eigenvalues below 1e-15 contribute zero.
double von_neumann_entropy(const ControlQubitState& rho);
double linear_entropy(const ControlQubitState& rho);

/// E = -Arg<exp(-iHt)>/t, with <exp(-iHt)> = 2 rho(1,0). The result lies in
/// (-pi/t, pi/t]. Throws DomainError for t == 0 and PhaseUndefinedError when
/// |rho(1,0)| <= 1e-12.
double energy_estimator(const ControlQubitState& rho, double t);

/// Energy, purity and entropies read off one control-qubit state.
struct WitnessReadout {
  double energy = 0.0;  // NaN when the phase is undefined
  double purity = 0.0;
  double von_neumann_entropy = 0.0;
  double linear_entropy = 0.0;
  std::optional<int> shots_used;  // empty for exact readout
};

WitnessReadout readout(const ControlQubitState& rho, double t,
                       std::optional<int> shots_used = std::nullopt);

/// Weights of F = b E - a P.
struct ObjectiveWeights {
  double a = 1.0;
  double b = 0.0;
};

/// Finite-shot single-qubit tomography of the control qubit.
struct NoisyTomography {
  int shots_per_basis = 1500;
};

struct ObjectiveValue {
  double value = 0.0;
  double energy = 0.0;  // NaN unless computed
  double purity = 0.0;
};

/// Estimates <X>, <Y>, <Z> from binomial counts and reconstructs rho. A Bloch
/// vector longer than 1 is rescaled to unit length.
ControlQubitState tomography_sample(const ControlQubitState& rho, int shots_per_basis, Rng& rng);

/// F = b E - a P from the exact control state, or from one tomographic
/// estimate when tomography is given (rng is then required). The energy is
/// evaluated only when b > 0 or need_energy is set; with b == 0 an undefined
/// phase yields energy = NaN instead of throwing.
ObjectiveValue objective(const StateVector& state, const HermitianEigensystem& eigensystem,
                         double t, ObjectiveWeights weights,
                         const std::optional<NoisyTomography>& tomography = std::nullopt,
                         Rng* rng = nullptr, bool need_energy = false);

/// Long-time average of the purity, (1 + sum_j |alpha_j|^4) / 2. Throws
/// DomainError if sum |alpha_j|^2 is off 1 by more than 1e-9.
double time_averaged_purity(const ComplexVector& alphas);

/// How to pick the Hadamard-test evolution time.
struct EvolutionTimeStrategy {
  /// Upper bound on the relevant eigenvalue spread. When empty the full
  /// spectral width of the eigensystem is used.
  std::optional<double> spread_estimate;
  /// Target value of spread * t.
  double target_phase = 1.5707963267948966;
};

/// t = target_phase / spread. Throws DomainError on a fully degenerate
/// spectrum or a non-positive spread estimate.
double choose_evolution_time(const HermitianEigensystem& eigensystem,
                             const EvolutionTimeStrategy& strategy = {});

}  // namespace waves
