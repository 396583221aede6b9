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

#include <string>
#include <vector>

#include "waves/statevector.hpp"

namespace waves {

/// Exact spectrum with eigenvectors grouped into degenerate subspaces.
struct SpectrumOracle {
  HermitianEigensystem eigensystem;
  /// Ascending by representative eigenvalue.
  std::vector<EigenSubspace> subspaces;
  double degeneracy_tolerance = 1e-9;
  /// Subspace index of every eigenvalue, in eigensystem order.
  std::vector<std::size_t> subspace_of;

  std::size_t num_subspaces() const noexcept { return subspaces.size(); }
  /// subspace_fidelity against every subspace.
  std::vector<double> subspace_fidelities(const StateVector& state) const;
};

/// (alpha - shift) I + beta X on one qubit.
PauliSum exciton_hamiltonian(double alpha = 1.46, double beta = 0.037, double shift = 1.24);

/// Reads a Hamiltonian file. Parse errors keep their line numbers and are
/// prefixed with the path.
PauliSum load_hamiltonian(const std::string& path);

/// num_terms distinct non-identity Pauli strings with coefficients uniform in
/// [-scale, scale]; the same seed always gives the same sum.
PauliSum random_hamiltonian(int num_qubits, std::size_t num_terms, double coefficient_scale,
                            std::uint64_t seed);

/// Diagonalizes and groups eigenvalues: a new subspace starts whenever the gap
/// to the previous representative exceeds the tolerance.
SpectrumOracle spectrum_oracle(const PauliSum& hamiltonian, double tolerance = 1e-9);
SpectrumOracle spectrum_oracle(HermitianEigensystem eigensystem, double tolerance = 1e-9);

}  // namespace waves
