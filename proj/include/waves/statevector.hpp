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

#include <string_view>
#include <vector>

#include "waves/pauli.hpp"

namespace waves {

/// Normalized pure state on n qubits. Amplitude index bits are ordered with
/// qubit 0 as the most significant bit, so "01" on two qubits is index 1.
class StateVector {
 public:
  StateVector() = default;
  /// Takes ownership of the amplitudes. Throws DimensionError if the length
  /// is not 2^n and DomainError if the norm deviates from 1 by more than
  /// 1e-10. Set renormalize to rescale instead of checking.
  StateVector(int num_qubits, ComplexVector amplitudes, bool renormalize = false);

  int num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

 private:
  int num_qubits_ = 0;
  ComplexVector amplitudes_;
};

/// A degenerate eigenspace: a representative eigenvalue and an orthonormal
/// basis of eigenvectors.
struct EigenSubspace {
  double eigenvalue = 0.0;
  std::vector<StateVector> basis;
};

StateVector basis_state(int num_qubits, std::string_view bits);

/// exp(-i H t)|state>, applied in the eigenbasis.
StateVector evolve(const StateVector& state, const HermitianEigensystem& eigensystem, double t);

/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

/// sum_k |<basis_k|state>|^2. Throws DomainError on an empty basis.
double subspace_fidelity(const StateVector& state, const EigenSubspace& subspace);

/// alpha_j = <lambda_j|state>.
ComplexVector eigenbasis_amplitudes(const StateVector& state,
                                    const HermitianEigensystem& eigensystem);

/// Column j of the eigensystem as a state.
StateVector eigenstate(const HermitianEigensystem& eigensystem, std::size_t j);

/// Haar-distributed random state.
StateVector random_state(int num_qubits, Rng& rng);

}  // namespace waves
