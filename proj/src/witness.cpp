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

#include "waves/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace waves {

Eigen::Vector3d ControlQubitState::bloch() const {
  return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

ControlQubitState ControlQubitState::from_bloch(const Eigen::Vector3d& r) {
  ControlQubitState out;
  out.rho(0, 0) = 0.5 * (1.0 + r.z());
  out.rho(1, 1) = 0.5 * (1.0 - r.z());
  out.rho(1, 0) = Complex(0.5 * r.x(), 0.5 * r.y());
  out.rho(0, 1) = std::conj(out.rho(1, 0));
  return out;
}

ControlQubitState control_density_from_populations(const RealVector& populations,
                                                   const RealVector& eigenvalues, double t) {
  if (populations.size() != eigenvalues.size()) {
    throw DimensionError("population and eigenvalue counts differ");
  }
  Complex coherence = 0.0;
  for (Eigen::Index j = 0; j < populations.size(); ++j) {
    coherence += populations[j] * std::polar(1.0, eigenvalues[j] * t);
  }
  ControlQubitState out;
  out.rho(0, 0) = 0.5;
  out.rho(1, 1) = 0.5;
  out.rho(0, 1) = 0.5 * coherence;
  out.rho(1, 0) = std::conj(out.rho(0, 1));
  return out;
}

ControlQubitState control_density(const StateVector& state,
                                  const HermitianEigensystem& eigensystem, double t) {
  if (!std::isfinite(t)) throw DomainError("evolution time must be finite");
  const ComplexVector alpha = eigenbasis_amplitudes(state, eigensystem);
  return control_density_from_populations(alpha.cwiseAbs2(), eigensystem.eigenvalues, t);
}

double purity(const ControlQubitState& rho) { return rho.rho.cwiseAbs2().sum(); }

double von_neumann_entropy(const ControlQubitState& rho) {
  // Eigenvalues of a 2x2 Hermitian matrix with unit trace: (1 +- |r|) / 2.
  const double half_trace = 0.5 * (rho.rho(0, 0) + rho.rho(1, 1)).real();
  const double diff = 0.5 * (rho.rho(0, 0) - rho.rho(1, 1)).real();
  const double radius = std::sqrt(diff * diff + std::norm(rho.rho(0, 1)));
  double s = 0.0;
  for (double p : {half_trace + radius, half_trace - radius}) {
    p = std::clamp(p, 0.0, 1.0);
    if (p > 1e-15) s -= p * std::log(p);
  }
  return s;
}

double linear_entropy(const ControlQubitState& rho) { return 1.0 - purity(rho); }

double energy_estimator(const ControlQubitState& rho, double t) {
  if (t == 0.0 || !std::isfinite(t)) throw DomainError("energy estimator needs finite t != 0");
  const Complex expectation = 2.0 * rho.rho(1, 0);
  if (std::abs(rho.rho(1, 0)) <= 1e-12) {
    throw PhaseUndefinedError("control-qubit coherence vanished; energy phase is undefined");
  }
  double phase = -std::arg(expectation);  // in [-pi, pi)
  if (phase <= -std::numbers::pi) phase = std::numbers::pi;
  return phase / t;
}

WitnessReadout readout(const ControlQubitState& rho, double t, std::optional<int> shots_used) {
  WitnessReadout r;
  r.purity = purity(rho);
  r.linear_entropy = 1.0 - r.purity;
  r.von_neumann_entropy = von_neumann_entropy(rho);
  r.shots_used = shots_used;
  try {
    r.energy = energy_estimator(rho, t);
  } catch (const PhaseUndefinedError&) {
    r.energy = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

ControlQubitState tomography_sample(const ControlQubitState& rho, int shots_per_basis, Rng& rng) {
  if (shots_per_basis < 1) throw DomainError("tomography needs at least one shot per basis");
  const Eigen::Vector3d exact = rho.bloch();
  Eigen::Vector3d estimate;
  for (int axis = 0; axis < 3; ++axis) {
    const double p_plus = std::clamp(0.5 * (1.0 + exact[axis]), 0.0, 1.0);
    std::binomial_distribution<int> counts(shots_per_basis, p_plus);
    const int k = counts(rng);
    estimate[axis] = 2.0 * static_cast<double>(k) / shots_per_basis - 1.0;
  }
  const double length = estimate.norm();
  if (length > 1.0) estimate /= length;
  return ControlQubitState::from_bloch(estimate);
}

ObjectiveValue objective(const StateVector& state, const HermitianEigensystem& eigensystem,
                         double t, ObjectiveWeights weights,
                         const std::optional<NoisyTomography>& tomography, Rng* rng,
                         bool need_energy) {
  if (weights.a < 0.0 || weights.b < 0.0 || (weights.a == 0.0 && weights.b == 0.0)) {
    throw DomainError("objective weights must be non-negative and not both zero");
  }
  ControlQubitState rho = control_density(state, eigensystem, t);
  if (tomography) {
    if (rng == nullptr) throw DomainError("noisy tomography requires an rng");
    rho = tomography_sample(rho, tomography->shots_per_basis, *rng);
  }
  ObjectiveValue out;
  out.purity = purity(rho);
  out.energy = std::numeric_limits<double>::quiet_NaN();
  if (weights.b > 0.0) {
    out.energy = energy_estimator(rho, t);
  } else if (need_energy) {
    try {
      out.energy = energy_estimator(rho, t);
    } catch (const PhaseUndefinedError&) {
    }
  }
  out.value = -weights.a * out.purity;
  if (weights.b > 0.0) out.value += weights.b * out.energy;
  return out;
}

double time_averaged_purity(const ComplexVector& alphas) {
  const RealVector populations = alphas.cwiseAbs2();
  if (std::abs(populations.sum() - 1.0) > 1e-9) {
    throw DomainError("amplitudes are not normalized");
  }
  return 0.5 * (1.0 + populations.cwiseAbs2().sum());
}

double choose_evolution_time(const HermitianEigensystem& eigensystem,
                             const EvolutionTimeStrategy& strategy) {
  double spread = 0.0;
  if (strategy.spread_estimate) {
    spread = *strategy.spread_estimate;
    if (!(spread > 0.0)) throw DomainError("spread estimate must be positive");
  } else {
    const auto& ev = eigensystem.eigenvalues;
    if (ev.size() == 0) throw DomainError("empty spectrum");
    spread = ev.maxCoeff() - ev.minCoeff();
    if (!(spread > 0.0)) throw DomainError("fully degenerate spectrum has no evolution-time scale");
  }
  return strategy.target_phase / spread;
}

}  // namespace waves
