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

#include "waves/hamiltonians.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <set>
#include <sstream>

namespace waves {

std::vector<double> SpectrumOracle::subspace_fidelities(const StateVector& state) const {
  const ComplexVector alpha = eigenbasis_amplitudes(state, eigensystem);
  std::vector<double> out(subspaces.size(), 0.0);
  for (Eigen::Index j = 0; j < alpha.size(); ++j) {
    out[subspace_of[static_cast<std::size_t>(j)]] += std::norm(alpha[j]);
  }
  for (auto& f : out) f = std::min(f, 1.0);
  return out;
}

PauliSum exciton_hamiltonian(double alpha, double beta, double shift) {
  return PauliSum(1, {PauliTerm(alpha - shift, {}), PauliTerm(beta, {{0, PauliAxis::X}})});
}

PauliSum load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open Hamiltonian file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_pauli_sum(buf.str());
  } catch (const ParseError& e) {
    throw e.in(path);
  }
}

PauliSum random_hamiltonian(int num_qubits, std::size_t num_terms, double coefficient_scale,
                            std::uint64_t seed) {
  if (num_qubits < 1 || num_qubits > kMaxDenseQubits) {
    throw DomainError("random Hamiltonian qubit count out of range");
  }
  const std::uint64_t strings = std::uint64_t{1} << (2 * num_qubits);
  if (num_terms > strings - 1) {
    throw DomainError("requested " + std::to_string(num_terms) + " terms but only " +
                      std::to_string(strings - 1) + " non-identity Pauli strings exist");
  }
  Rng rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(1, strings - 1);
  std::uniform_real_distribution<double> coeff(-coefficient_scale, coefficient_scale);
  std::set<std::uint64_t> chosen;
  std::vector<PauliTerm> terms;
  while (chosen.size() < num_terms) {
    const std::uint64_t code = pick(rng);
    if (!chosen.insert(code).second) continue;
    std::vector<PauliFactor> factors;
    for (int q = 0; q < num_qubits; ++q) {
      const auto digit = (code >> (2 * q)) & 3U;
      if (digit == 1) factors.push_back({q, PauliAxis::X});
      if (digit == 2) factors.push_back({q, PauliAxis::Y});
      if (digit == 3) factors.push_back({q, PauliAxis::Z});
    }
    const double c = coefficient_scale == 0.0 ? 0.0 : coeff(rng);
    terms.emplace_back(c, std::move(factors));
  }
  return PauliSum(num_qubits, std::move(terms));
}

SpectrumOracle spectrum_oracle(HermitianEigensystem eigensystem, double tolerance) {
  if (!(tolerance >= 0.0)) throw DomainError("degeneracy tolerance must be >= 0");
  SpectrumOracle oracle;
  oracle.degeneracy_tolerance = tolerance;
  const auto dim = eigensystem.dimension();
  const int n = std::countr_zero(dim);
  oracle.subspace_of.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const double lambda = eigensystem.eigenvalues[static_cast<Eigen::Index>(j)];
    if (oracle.subspaces.empty() || lambda - oracle.subspaces.back().eigenvalue > tolerance) {
      oracle.subspaces.push_back({lambda, {}});
    }
    oracle.subspaces.back().basis.emplace_back(
        n, eigensystem.eigenvectors.col(static_cast<Eigen::Index>(j)), true);
    oracle.subspace_of[j] = oracle.subspaces.size() - 1;
  }
  oracle.eigensystem = std::move(eigensystem);
  return oracle;
}

SpectrumOracle spectrum_oracle(const PauliSum& hamiltonian, double tolerance) {
  return spectrum_oracle(eigendecompose(hamiltonian), tolerance);
}

}  // namespace waves
