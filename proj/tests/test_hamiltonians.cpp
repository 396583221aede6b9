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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "waves/hamiltonians.hpp"

namespace waves {
namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

ComplexMatrix projector_sum(const SpectrumOracle& o) {
  const auto dim = static_cast<Eigen::Index>(o.eigensystem.dimension());
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const EigenSubspace& s : o.subspaces) {
    for (const StateVector& v : s.basis) sum += v.amplitudes() * v.amplitudes().adjoint();
  }
  return sum;
}

TEST(Exciton, DefaultCoefficients) {
  const PauliSum h = exciton_hamiltonian();
  EXPECT_EQ(h.num_qubits(), 1);
  Eigen::Matrix2cd expected;
  expected << 0.22, 0.037, 0.037, 0.22;
  EXPECT_LT((oracle::dense(h) - expected).norm(), 1e-14);
}

TEST(Exciton, ClosedFormSpectrum) {
  const SpectrumOracle o = spectrum_oracle(exciton_hamiltonian());
  ASSERT_EQ(o.num_subspaces(), 2u);
  EXPECT_NEAR(o.subspaces[0].eigenvalue, 0.183, 1e-12);
  EXPECT_NEAR(o.subspaces[1].eigenvalue, 0.257, 1e-12);
  EXPECT_EQ(o.subspaces[0].basis.size(), 1u);
  // Ground state is |-> because beta > 0.
  const StateVector minus(1, Eigen::Vector2cd(1.0, -1.0) / std::sqrt(2.0));
  EXPECT_NEAR(fidelity(o.subspaces[0].basis[0], minus), 1.0, 1e-12);
  for (double a : {0.5, 1.3}) {
    for (double b : {-0.2, 0.01, 0.4}) {
      const SpectrumOracle g = spectrum_oracle(exciton_hamiltonian(a, b, 0.1));
      EXPECT_NEAR(g.eigensystem.eigenvalues[0], a - 0.1 - std::abs(b), 1e-12);
      EXPECT_NEAR(g.eigensystem.eigenvalues[1], a - 0.1 + std::abs(b), 1e-12);
    }
  }
}

TEST(Exciton, ZeroOperator) {
  const SpectrumOracle o = spectrum_oracle(exciton_hamiltonian(0.7, 0.0, 0.7));
  EXPECT_EQ(o.num_subspaces(), 1u);
  EXPECT_EQ(o.eigensystem.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
}

TEST(LoadHamiltonian, ReadsGrammar) {
  const std::string path =
      write_temp("waves_h_ok.txt", "# exciton\nqubits 1\n0.22\n0.037 X0\n");
  EXPECT_EQ(load_hamiltonian(path), parse_pauli_sum("qubits 1\n0.22\n0.037 X0"));
  const std::string two = write_temp("waves_h_two.txt", "qubits 2\n1.0 Z0 Z1\n# field\n-0.5 X1\n");
  EXPECT_EQ(load_hamiltonian(two), parse_pauli_sum("qubits 2\n1 Z0 Z1\n-0.5 X1"));
}

TEST(LoadHamiltonian, ErrorsNamePathAndLine) {
  EXPECT_THROW(load_hamiltonian("/nonexistent/h.txt"), Error);
  const std::string bad = write_temp("waves_h_bad.txt", "qubits 1\n0.2\n0.1 Q0\n");
  try {
    load_hamiltonian(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(std::string(e.what()), "line 3: " + bad + ": " + e.detail().substr(bad.size() + 2));
    EXPECT_NE(e.detail().find(bad), std::string::npos);
  }
}

TEST(RandomHamiltonian, DeterministicPerSeed) {
  EXPECT_EQ(random_hamiltonian(2, 3, 1.0, 7), random_hamiltonian(2, 3, 1.0, 7));
  EXPECT_NE(random_hamiltonian(2, 3, 1.0, 7), random_hamiltonian(2, 3, 1.0, 8));
}

TEST(RandomHamiltonian, TermsAndScale) {
  const PauliSum h = random_hamiltonian(3, 10, 0.5, 3);
  ASSERT_EQ(h.terms().size(), 10u);
  for (const PauliTerm& t : h.terms()) {
    EXPECT_FALSE(t.is_identity());
    EXPECT_LE(std::abs(t.coefficient()), 0.5);
  }
  const PauliSum zero = random_hamiltonian(2, 4, 0.0, 3);
  EXPECT_EQ(oracle::dense(zero).norm(), 0.0);
  EXPECT_EQ(random_hamiltonian(1, 3, 1.0, 1).terms().size(), 3u);
  EXPECT_THROW(random_hamiltonian(1, 4, 1.0, 1), DomainError);
  EXPECT_THROW(random_hamiltonian(13, 1, 1.0, 1), DomainError);
}

TEST(RandomHamiltonian, HermitianRealSpectrumAgainstLapack) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int n = 1 + static_cast<int>(seed % 4);
    const PauliSum h = random_hamiltonian(n, std::min<std::size_t>(8, (std::size_t{1} << (2 * n)) - 1), 1.0, seed);
    const ComplexMatrix d = oracle::dense(h);
    EXPECT_LT((d - d.adjoint()).norm(), 1e-14);
    const std::vector<double> ref = oracle::eigenvalues(d);
    const SpectrumOracle o = spectrum_oracle(h);
    for (std::size_t j = 0; j < ref.size(); ++j) {
      EXPECT_NEAR(o.eigensystem.eigenvalues[static_cast<Eigen::Index>(j)], ref[j], 1e-10);
    }
  }
}

TEST(SpectrumOracleTest, DegenerateExamples) {
  const SpectrumOracle zz = spectrum_oracle(parse_pauli_sum("qubits 2\n1 Z0 Z1"));
  ASSERT_EQ(zz.num_subspaces(), 2u);
  EXPECT_EQ(zz.subspaces[0].eigenvalue, -1.0);
  EXPECT_EQ(zz.subspaces[0].basis.size(), 2u);
  EXPECT_EQ(zz.subspaces[1].basis.size(), 2u);
  // Subspace membership, not vector identity.
  EXPECT_NEAR(subspace_fidelity(basis_state(2, "01"), zz.subspaces[0]), 1.0, 1e-12);
  EXPECT_NEAR(subspace_fidelity(basis_state(2, "11"), zz.subspaces[1]), 1.0, 1e-12);

  const SpectrumOracle id = spectrum_oracle(parse_pauli_sum("qubits 3\n0.7"));
  ASSERT_EQ(id.num_subspaces(), 1u);
  EXPECT_EQ(id.subspaces[0].basis.size(), 8u);
}

TEST(SpectrumOracleTest, ToleranceControlsGrouping) {
  const PauliSum h = parse_pauli_sum("qubits 1\n1e-6 Z0");
  EXPECT_EQ(spectrum_oracle(h).num_subspaces(), 2u);
  EXPECT_EQ(spectrum_oracle(h, 1e-5).num_subspaces(), 1u);
  EXPECT_THROW(spectrum_oracle(h, -1.0), DomainError);
}

TEST(SpectrumOracleTest, StructuralInvariants) {
  Rng rng(5);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int n = 1 + static_cast<int>(seed % 4);
    // Few terms on many qubits tends to produce degeneracies.
    const PauliSum h = random_hamiltonian(n, 1 + seed % 3, 1.0, seed);
    const SpectrumOracle o = spectrum_oracle(h);
    std::size_t total = 0;
    for (std::size_t s = 0; s < o.num_subspaces(); ++s) {
      total += o.subspaces[s].basis.size();
      if (s > 0) EXPECT_GT(o.subspaces[s].eigenvalue - o.subspaces[s - 1].eigenvalue, o.degeneracy_tolerance);
    }
    EXPECT_EQ(total, h.dimension());
    for (std::size_t j = 0; j < h.dimension(); ++j) {
      const double lambda = o.eigensystem.eigenvalues[static_cast<Eigen::Index>(j)];
      const double rep = o.subspaces[o.subspace_of[j]].eigenvalue;
      EXPECT_LE(lambda - rep, o.degeneracy_tolerance);
      EXPECT_GE(lambda - rep, 0.0);
    }
    const auto dim = static_cast<Eigen::Index>(h.dimension());
    EXPECT_LT((projector_sum(o) - ComplexMatrix::Identity(dim, dim)).norm(), 1e-9);
    const StateVector r = random_state(n, rng);
    const std::vector<double> f = o.subspace_fidelities(r);
    double sum = 0.0;
    for (double x : f) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-10);
  }
}

TEST(SpectrumOracleTest, FidelitiesInvariantUnderBasisRotation) {
  // Rotate a degenerate block by a unitary; subspace fidelities must not move.
  const SpectrumOracle zz = spectrum_oracle(parse_pauli_sum("qubits 2\n1 Z0 Z1"));
  HermitianEigensystem rotated = zz.eigensystem;
  Eigen::Matrix2cd u;
  const double c = std::cos(0.7), s = std::sin(0.7);
  u << c, Complex(0.0, s), Complex(0.0, s), c;
  rotated.eigenvectors.leftCols(2) = rotated.eigenvectors.leftCols(2) * u;
  const SpectrumOracle other = spectrum_oracle(rotated);
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const StateVector r = random_state(2, rng);
    const auto a = zz.subspace_fidelities(r);
    const auto b = other.subspace_fidelities(r);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
  }
}

}  // namespace
}  // namespace waves
