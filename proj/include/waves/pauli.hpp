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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "waves/types.hpp"

namespace waves {

enum class PauliAxis : std::uint8_t { X, Y, Z };

char axis_char(PauliAxis axis) noexcept;

struct PauliFactor {
  int qubit = 0;
  PauliAxis axis = PauliAxis::Z;

  auto operator<=>(const PauliFactor&) const = default;
};

/// A real coefficient times a tensor product of single-qubit Paulis.
/// Factors are kept sorted by qubit with no repeats; an empty factor list is
/// the identity.
class PauliTerm {
 public:
  PauliTerm() = default;
  /// Throws ParseError on a repeated qubit index. Factors may arrive in any
  /// order.
  PauliTerm(double coefficient, std::vector<PauliFactor> factors);

  double coefficient() const noexcept { return coefficient_; }
  const std::vector<PauliFactor>& factors() const noexcept { return factors_; }
  bool is_identity() const noexcept { return factors_.empty(); }
  int max_qubit() const noexcept { return factors_.empty() ? -1 : factors_.back().qubit; }

  /// Bit masks over amplitude indices (qubit 0 is the most significant bit)
  /// of the X-type and Z-type parts, and the number of Y factors.
  struct Masks {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    int num_y = 0;
  };
  Masks masks(int num_qubits) const;

  bool operator==(const PauliTerm&) const = default;

 private:
  friend class PauliSum;
  double coefficient_ = 0.0;
  std::vector<PauliFactor> factors_;
};

/// Real-weighted sum of Pauli strings on a fixed register. Terms are merged
/// by factor list and kept in canonical order (identity first, then
/// lexicographic on (qubit, axis)), so two sums denoting the same operator
/// expansion compare equal.
class PauliSum {
 public:
  PauliSum() = default;
  /// Throws DomainError if num_qubits < 1 or a term touches a qubit >= n.
  PauliSum(int num_qubits, std::vector<PauliTerm> terms);

  int num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return std::size_t{1} << num_qubits_; }
  const std::vector<PauliTerm>& terms() const noexcept { return terms_; }

  PauliSum scaled(double factor) const;
  /// Sum of two operators on the same register.
  PauliSum operator+(const PauliSum& other) const;

  bool operator==(const PauliSum&) const = default;

 private:
  int num_qubits_ = 0;
  std::vector<PauliTerm> terms_;
};

/// Parses the Hamiltonian text grammar:
///
///     # comment
///     qubits <n>
///     <coefficient> [<axis><index> ...]
///
/// Throws ParseError carrying the offending line number.
PauliSum parse_pauli_sum(std::string_view text);

/// Parses one `<coefficient> [<axis><index> ...]` line. line_no is only used
/// for error messages.
PauliTerm parse_pauli_term(std::string_view line, int num_qubits, std::size_t line_no);

/// Inverse of parse_pauli_sum. Coefficients are written with 17 significant
/// digits so that re-parsing is exact.
std::string format_pauli_sum(const PauliSum& sum);

/// Dense 2^n x 2^n matrix. Throws DomainError above kMaxDenseQubits.
ComplexMatrix to_dense(const PauliSum& sum);

/// Applies the operator to a vector without forming the matrix.
ComplexVector apply(const PauliSum& sum, const ComplexVector& amplitudes);

/// Expands a Hermitian matrix of size 2^n in the Pauli basis. Coefficients
/// with magnitude <= drop_tolerance are omitted. Throws DimensionError if the
/// size is not a power of two.
PauliSum decompose_hermitian(const ComplexMatrix& matrix, double drop_tolerance = 1e-14);

/// Spectrum of a Hermitian operator: ascending eigenvalues and the matching
/// orthonormal eigenvectors as columns.
struct HermitianEigensystem {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

HermitianEigensystem eigendecompose(const ComplexMatrix& hermitian);
HermitianEigensystem eigendecompose(const PauliSum& sum);

/// exp(-i H t) assembled from the eigensystem.
ComplexMatrix unitary_exponential(const HermitianEigensystem& eigensystem, double t);

/// exp(i sum_j weights[j] * G_j) for Hermitian generators G_j.
/// Throws DimensionError on mismatched registers or weight count.
ComplexMatrix antihermitian_exponential(std::span<const PauliSum> generators,
                                        std::span<const double> weights);

}  // namespace waves
