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

#include "waves/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace waves {

char axis_char(PauliAxis axis) noexcept {
  switch (axis) {
    case PauliAxis::X:
      return 'X';
    case PauliAxis::Y:
      return 'Y';
    case PauliAxis::Z:
      return 'Z';
  }
  return '?';
}

PauliTerm::PauliTerm(double coefficient, std::vector<PauliFactor> factors)
    : coefficient_(coefficient), factors_(std::move(factors)) {
  std::sort(factors_.begin(), factors_.end());
  for (std::size_t k = 1; k < factors_.size(); ++k) {
    if (factors_[k].qubit == factors_[k - 1].qubit) {
      throw ParseError("duplicate qubit index " + std::to_string(factors_[k].qubit) +
                       " in one Pauli term");
    }
  }
  if (!factors_.empty() && factors_.front().qubit < 0) {
    throw ParseError("negative qubit index");
  }
}

PauliTerm::Masks PauliTerm::masks(int num_qubits) const {
  Masks m;
  for (const auto& f : factors_) {
    const std::uint64_t bit = std::uint64_t{1} << (num_qubits - 1 - f.qubit);
    switch (f.axis) {
      case PauliAxis::X:
        m.x |= bit;
        break;
      case PauliAxis::Y:
        m.x |= bit;
        m.z |= bit;
        ++m.num_y;
        break;
      case PauliAxis::Z:
        m.z |= bit;
        break;
    }
  }
  return m;
}

PauliSum::PauliSum(int num_qubits, std::vector<PauliTerm> terms) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > 62) {
    throw DomainError("qubit count must be in [1, 62], got " + std::to_string(num_qubits));
  }
  std::map<std::vector<PauliFactor>, double> merged;
  for (auto& term : terms) {
    if (term.max_qubit() >= num_qubits) {
      throw DomainError("qubit index " + std::to_string(term.max_qubit()) +
                        " out of range for " + std::to_string(num_qubits) + " qubits");
    }
    merged[term.factors_] += term.coefficient_;
  }
  // std::map orders the empty (identity) key first.
  terms_.reserve(merged.size());
  for (auto& [factors, coefficient] : merged) {
    PauliTerm t;
    t.coefficient_ = coefficient;
    t.factors_ = factors;
    terms_.push_back(std::move(t));
  }
}

PauliSum PauliSum::scaled(double factor) const {
  PauliSum out = *this;
  for (auto& t : out.terms_) t.coefficient_ *= factor;
  return out;
}

PauliSum PauliSum::operator+(const PauliSum& other) const {
  if (other.num_qubits_ != num_qubits_) {
    throw DimensionError("cannot add Pauli sums on different registers");
  }
  std::vector<PauliTerm> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return PauliSum(num_qubits_, std::move(all));
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view token, double& out) {
  // std::from_chars rejects a leading '+'.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

bool parse_int(std::string_view token, int& out) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

PauliTerm parse_pauli_term(std::string_view line, int num_qubits, std::size_t line_no) {
  const auto tokens = split_ws(line);
  if (tokens.empty()) throw ParseError(line_no, "empty term line");
  double coefficient = 0.0;
  if (!parse_double(tokens[0], coefficient)) {
    throw ParseError(line_no, "bad coefficient '" + std::string(tokens[0]) + "'");
  }
  std::vector<PauliFactor> factors;
  for (std::size_t k = 1; k < tokens.size(); ++k) {
    const auto tok = tokens[k];
    PauliFactor f;
    switch (tok.front()) {
      case 'X':
        f.axis = PauliAxis::X;
        break;
      case 'Y':
        f.axis = PauliAxis::Y;
        break;
      case 'Z':
        f.axis = PauliAxis::Z;
        break;
      default:
        throw ParseError(line_no, "bad Pauli token '" + std::string(tok) + "'");
    }
    if (tok.size() < 2 || !parse_int(tok.substr(1), f.qubit) || f.qubit < 0) {
      throw ParseError(line_no, "bad qubit index in '" + std::string(tok) + "'");
    }
    if (f.qubit >= num_qubits) {
      throw ParseError(line_no, "qubit index " + std::to_string(f.qubit) +
                                    " >= declared qubit count " + std::to_string(num_qubits));
    }
    factors.push_back(f);
  }
  try {
    return PauliTerm(coefficient, std::move(factors));
  } catch (const ParseError& e) {
    throw ParseError(line_no, e.what());
  }
}

PauliSum parse_pauli_sum(std::string_view text) {
  int num_qubits = -1;
  std::vector<PauliTerm> terms;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;

    if (num_qubits < 0) {
      if (tokens.size() != 2 || tokens[0] != "qubits" || !parse_int(tokens[1], num_qubits) ||
          num_qubits < 1) {
        throw ParseError(line_no, "expected 'qubits <n>' with n >= 1");
      }
      continue;
    }

    terms.push_back(parse_pauli_term(line, num_qubits, line_no));
  }
  if (num_qubits < 0) throw ParseError("missing 'qubits <n>' header");
  return PauliSum(num_qubits, std::move(terms));
}

std::string format_pauli_sum(const PauliSum& sum) {
  std::ostringstream os;
  os << "qubits " << sum.num_qubits() << '\n';
  os << std::setprecision(17);
  for (const auto& t : sum.terms()) {
    os << t.coefficient();
    for (const auto& f : t.factors()) os << ' ' << axis_char(f.axis) << f.qubit;
    os << '\n';
  }
  return os.str();
}

namespace {

void check_dense_cap(int n) {
  if (n > kMaxDenseQubits) {
    throw DomainError("dense matrices are limited to " + std::to_string(kMaxDenseQubits) +
                      " qubits, got " + std::to_string(n));
  }
}

// i^k for k mod 4.
Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, 1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, -1.0};
  }
}

}  // namespace

// P|j> = i^{#Y} (-1)^{popcount(j & z)} |j ^ x>, with Y = i X Z.
ComplexMatrix to_dense(const PauliSum& sum) {
  check_dense_cap(sum.num_qubits());
  const std::size_t dim = sum.dimension();
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (const auto& term : sum.terms()) {
    const auto mk = term.masks(sum.num_qubits());
    const Complex base = term.coefficient() * i_power(mk.num_y);
    for (std::size_t j = 0; j < dim; ++j) {
      const double sign = (std::popcount(j & mk.z) & 1) ? -1.0 : 1.0;
      m(j ^ mk.x, j) += sign * base;
    }
  }
  return m;
}

ComplexVector apply(const PauliSum& sum, const ComplexVector& amplitudes) {
  const std::size_t dim = sum.dimension();
  if (static_cast<std::size_t>(amplitudes.size()) != dim) {
    throw DimensionError("vector length does not match the operator register");
  }
  ComplexVector out = ComplexVector::Zero(dim);
  for (const auto& term : sum.terms()) {
    const auto mk = term.masks(sum.num_qubits());
    const Complex base = term.coefficient() * i_power(mk.num_y);
    for (std::size_t j = 0; j < dim; ++j) {
      const double sign = (std::popcount(j & mk.z) & 1) ? -1.0 : 1.0;
      out[j ^ mk.x] += sign * base * amplitudes[j];
    }
  }
  return out;
}

// c_P = Tr(P M) / 2^n = 2^-n sum_k phase_P(k) M(k, k ^ x).
PauliSum decompose_hermitian(const ComplexMatrix& matrix, double drop_tolerance) {
  const auto dim = static_cast<std::size_t>(matrix.rows());
  if (dim < 2 || matrix.cols() != matrix.rows() || !std::has_single_bit(dim)) {
    throw DimensionError("matrix size must be a power of two >= 2");
  }
  const int n = std::countr_zero(dim);
  check_dense_cap(n);
  std::vector<PauliTerm> terms;
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t z = 0; z < dim; ++z) {
      const int num_y = std::popcount(x & z);
      const Complex base = i_power(num_y);
      Complex acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double sign = (std::popcount(k & z) & 1) ? -1.0 : 1.0;
        acc += sign * matrix(k, k ^ x);
      }
      const double c = (base * acc).real() / static_cast<double>(dim);
      if (std::abs(c) <= drop_tolerance) continue;
      std::vector<PauliFactor> factors;
      for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
        const bool hx = x & bit;
        const bool hz = z & bit;
        if (hx && hz) {
          factors.push_back({q, PauliAxis::Y});
        } else if (hx) {
          factors.push_back({q, PauliAxis::X});
        } else if (hz) {
          factors.push_back({q, PauliAxis::Z});
        }
      }
      terms.emplace_back(c, std::move(factors));
    }
  }
  return PauliSum(n, std::move(terms));
}

HermitianEigensystem eigendecompose(const ComplexMatrix& hermitian) {
  if (hermitian.rows() != hermitian.cols()) throw DimensionError("matrix is not square");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw Error("Hermitian eigensolver failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianEigensystem eigendecompose(const PauliSum& sum) { return eigendecompose(to_dense(sum)); }

ComplexMatrix unitary_exponential(const HermitianEigensystem& eigensystem, double t) {
  const auto& v = eigensystem.eigenvectors;
  ComplexVector phases(eigensystem.eigenvalues.size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) {
    phases[j] = std::polar(1.0, -eigensystem.eigenvalues[j] * t);
  }
  return v * phases.asDiagonal() * v.adjoint();
}

ComplexMatrix antihermitian_exponential(std::span<const PauliSum> generators,
                                        std::span<const double> weights) {
  if (generators.empty()) throw DimensionError("no generators");
  if (generators.size() != weights.size()) {
    throw DimensionError("weight count " + std::to_string(weights.size()) +
                         " does not match generator count " + std::to_string(generators.size()));
  }
  const int n = generators.front().num_qubits();
  check_dense_cap(n);
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix k = ComplexMatrix::Zero(dim, dim);
  for (std::size_t g = 0; g < generators.size(); ++g) {
    if (generators[g].num_qubits() != n) {
      throw DimensionError("generators act on different registers");
    }
    if (weights[g] != 0.0) k += weights[g] * to_dense(generators[g]);
  }
  // exp(i K) = V diag(e^{i mu}) V^dagger, i.e. exp(-i H t) with H = K, t = -1.
  return unitary_exponential(eigendecompose(k), -1.0);
}

}  // namespace waves
