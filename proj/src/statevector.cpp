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

#include "waves/statevector.hpp"

#include <bit>
#include <cmath>

namespace waves {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

}  // namespace

StateVector::StateVector(int num_qubits, ComplexVector amplitudes, bool renormalize)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
  if (num_qubits < 1 || num_qubits > 30) {
    throw DomainError("qubit count out of range: " + std::to_string(num_qubits));
  }
  if (static_cast<std::size_t>(amplitudes_.size()) != (std::size_t{1} << num_qubits)) {
    throw DimensionError("state of " + std::to_string(num_qubits) + " qubits needs " +
                         std::to_string(std::size_t{1} << num_qubits) + " amplitudes, got " +
                         std::to_string(amplitudes_.size()));
  }
  const double norm = amplitudes_.norm();
  if (renormalize) {
    if (!(norm > 0.0)) throw DomainError("cannot normalize a zero vector");
    amplitudes_ /= norm;
  } else if (std::abs(norm * norm - 1.0) > 1e-10) {
    throw DomainError("state is not normalized (norm^2 = " + std::to_string(norm * norm) + ")");
  }
}

StateVector basis_state(int num_qubits, std::string_view bits) {
  if (bits.size() != static_cast<std::size_t>(num_qubits)) {
    throw DimensionError("bitstring of length " + std::to_string(bits.size()) + " for " +
                         std::to_string(num_qubits) + " qubits");
  }
  std::size_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw DomainError("bitstring must contain only 0 and 1");
    index = (index << 1) | static_cast<std::size_t>(c == '1');
  }
  ComplexVector amps = ComplexVector::Zero(std::size_t{1} << num_qubits);
  amps[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(num_qubits, std::move(amps));
}

ComplexVector eigenbasis_amplitudes(const StateVector& state,
                                    const HermitianEigensystem& eigensystem) {
  require_same_dim(state.dimension(), eigensystem.dimension(), "eigenbasis_amplitudes");
  return eigensystem.eigenvectors.adjoint() * state.amplitudes();
}

StateVector evolve(const StateVector& state, const HermitianEigensystem& eigensystem, double t) {
  ComplexVector alpha = eigenbasis_amplitudes(state, eigensystem);
  for (Eigen::Index j = 0; j < alpha.size(); ++j) {
    alpha[j] *= std::polar(1.0, -eigensystem.eigenvalues[j] * t);
  }
  return StateVector(state.num_qubits(), eigensystem.eigenvectors * alpha, true);
}

double fidelity(const StateVector& a, const StateVector& b) {
  require_same_dim(a.dimension(), b.dimension(), "fidelity");
  return std::min(1.0, std::norm(a.amplitudes().dot(b.amplitudes())));
}

double subspace_fidelity(const StateVector& state, const EigenSubspace& subspace) {
  if (subspace.basis.empty()) throw DomainError("subspace has an empty basis");
  double total = 0.0;
  for (const auto& v : subspace.basis) total += fidelity(v, state);
  return std::min(1.0, total);
}

StateVector eigenstate(const HermitianEigensystem& eigensystem, std::size_t j) {
  if (j >= eigensystem.dimension()) throw DomainError("eigenstate index out of range");
  const int n = std::countr_zero(eigensystem.dimension());
  return StateVector(n, eigensystem.eigenvectors.col(static_cast<Eigen::Index>(j)), true);
}

StateVector random_state(int num_qubits, Rng& rng) {
  std::normal_distribution<double> normal;
  ComplexVector amps(std::size_t{1} << num_qubits);
  for (auto& a : amps) a = Complex(normal(rng), normal(rng));
  return StateVector(num_qubits, std::move(amps), true);
}

}  // namespace waves
