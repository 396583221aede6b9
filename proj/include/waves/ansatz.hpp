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

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "waves/statevector.hpp"

namespace waves {

enum class AnsatzForm {
  /// exp(i sum_j theta_j G_j)|ref>
  ExponentialOfSum,
  /// exp(i theta_0 G_0) exp(i theta_1 G_1) ... |ref>, rightmost factor first.
  OrderedProduct,
};

/// Parametrized state preparation: Hermitian generators, a computational
/// reference state and the way the parameters enter.
struct AnsatzSpec {
  int num_qubits = 0;
  std::vector<PauliSum> generators;
  std::string reference_bits;
  std::string name;
  AnsatzForm form = AnsatzForm::ExponentialOfSum;

  std::size_t num_parameters() const noexcept { return generators.size(); }
  /// Throws DimensionError/DomainError when the invariants do not hold.
  void validate() const;
};

/// The single-qubit rotation used on the photonic chip:
/// exp(i phi_b Z/2) exp(i phi_c Y/2)|0>, parameters (phi_b, phi_c).
AnsatzSpec single_qubit_rotation_ansatz();

/// Ansatz file: a `qubits <n>` header, a `reference <bits>` line, an optional
/// `form sum|product` line and one `generator` line per generator, each
/// followed by Pauli-term lines in the Hamiltonian grammar.
AnsatzSpec parse_ansatz(std::string_view text, std::string name = "file");
AnsatzSpec load_ansatz(const std::string& path);
std::string format_ansatz(const AnsatzSpec& spec);

/// An AnsatzSpec with its dense generators precomputed. Immutable and safe to
/// share between threads.
class Ansatz {
 public:
  explicit Ansatz(AnsatzSpec spec);

  const AnsatzSpec& spec() const noexcept { return spec_; }
  std::size_t num_parameters() const noexcept { return spec_.num_parameters(); }
  const StateVector& reference() const noexcept { return reference_; }

  /// Noise-free preparation. Throws DimensionError on a wrong theta length.
  StateVector prepare(std::span<const double> theta) const;

 private:
  AnsatzSpec spec_;
  StateVector reference_;
  std::vector<ComplexMatrix> dense_generators_;
  std::vector<HermitianEigensystem> generator_spectra_;
};

/// Gaussian jitter of standard deviation sigma on every parameter.
struct ParameterNoise {
  double sigma = 0.0;
};

/// Prepares the trial state, perturbing theta by i.i.d. N(0, sigma) when noise
/// is given (rng is then required).
StateVector prepare(const Ansatz& ansatz, std::span<const double> theta,
                    const std::optional<ParameterNoise>& noise = std::nullopt, Rng* rng = nullptr);

/// exp(i angle G) for a Hermitian generator G.
struct ExcitationOp {
  PauliSum generator;
  double angle = std::numbers::pi / 2.0;

  ComplexMatrix unitary() const;
};

/// The identity excitation on n qubits.
ExcitationOp identity_excitation(int num_qubits);

StateVector apply_excitation(const StateVector& state, const ExcitationOp& op);
StateVector apply_unitary(const StateVector& state, const ComplexMatrix& unitary);

struct TruncationResult {
  AnsatzSpec spec;
  std::vector<double> theta;           // theta_g restricted to the kept generators
  std::vector<std::size_t> removed;    // original indices, in removal order
  double guess_fidelity = 0.0;         // of the returned ansatz's initial guess
  bool blocked = false;                // the full ansatz already misses the threshold
};

/// Greedily removes the generator with the smallest |theta_g| (lowest index
/// on ties) while the excited guess exp(i angle G_exc) A'(theta_g)|ref> keeps
/// subspace fidelity >= threshold with the target. At least one generator is
/// always kept.
TruncationResult truncate_ansatz(const AnsatzSpec& spec, std::span<const double> theta_g,
                                 const ExcitationOp& excitation, const EigenSubspace& target,
                                 double threshold);

}  // namespace waves
