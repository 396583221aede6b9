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

#include "waves/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace waves {

void AnsatzSpec::validate() const {
  if (num_qubits < 1 || num_qubits > kMaxDenseQubits) {
    throw DomainError("ansatz qubit count out of range: " + std::to_string(num_qubits));
  }
  if (generators.empty()) throw DomainError("ansatz '" + name + "' has no generators");
  for (const auto& g : generators) {
    if (g.num_qubits() != num_qubits) {
      throw DimensionError("ansatz generator acts on " + std::to_string(g.num_qubits()) +
                           " qubits, expected " + std::to_string(num_qubits));
    }
  }
  if (reference_bits.size() != static_cast<std::size_t>(num_qubits)) {
    throw DimensionError("reference bitstring length does not match qubit count");
  }
}

AnsatzSpec single_qubit_rotation_ansatz() {
  AnsatzSpec spec;
  spec.num_qubits = 1;
  spec.name = "single-qubit-rotation";
  spec.reference_bits = "0";
  spec.form = AnsatzForm::OrderedProduct;
  spec.generators.push_back(PauliSum(1, {PauliTerm(0.5, {{0, PauliAxis::Z}})}));
  spec.generators.push_back(PauliSum(1, {PauliTerm(0.5, {{0, PauliAxis::Y}})}));
  return spec;
}

AnsatzSpec parse_ansatz(std::string_view text, std::string name) {
  AnsatzSpec spec;
  spec.name = std::move(name);
  spec.num_qubits = -1;
  std::vector<std::vector<PauliTerm>> blocks;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string head;
    if (!(tokens >> head) || head.front() == '#') continue;
    if (spec.num_qubits < 0) {
      int n = 0;
      std::string rest;
      if (head != "qubits" || !(tokens >> n) || n < 1 || (tokens >> rest)) {
        throw ParseError(line_no, "expected 'qubits <n>' with n >= 1");
      }
      spec.num_qubits = n;
      continue;
    }
    if (head == "reference") {
      if (!(tokens >> spec.reference_bits)) throw ParseError(line_no, "missing reference bits");
      if (spec.reference_bits.size() != static_cast<std::size_t>(spec.num_qubits) ||
          spec.reference_bits.find_first_not_of("01") != std::string::npos) {
        throw ParseError(line_no, "reference must be a bitstring of length " +
                                      std::to_string(spec.num_qubits));
      }
    } else if (head == "form") {
      std::string form;
      tokens >> form;
      if (form == "sum") {
        spec.form = AnsatzForm::ExponentialOfSum;
      } else if (form == "product") {
        spec.form = AnsatzForm::OrderedProduct;
      } else {
        throw ParseError(line_no, "form must be 'sum' or 'product'");
      }
    } else if (head == "generator") {
      blocks.emplace_back();
    } else {
      if (blocks.empty()) throw ParseError(line_no, "term line before the first 'generator'");
      blocks.back().push_back(parse_pauli_term(line, spec.num_qubits, line_no));
    }
  }
  if (spec.num_qubits < 0) throw ParseError("missing 'qubits <n>' header");
  if (spec.reference_bits.empty()) spec.reference_bits.assign(spec.num_qubits, '0');
  for (auto& block : blocks) {
    if (block.empty()) throw ParseError("empty generator block");
    spec.generators.emplace_back(spec.num_qubits, std::move(block));
  }
  spec.validate();
  return spec;
}

AnsatzSpec load_ansatz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open ansatz file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_ansatz(buf.str(), path);
  } catch (const ParseError& e) {
    throw e.in(path);
  }
}

std::string format_ansatz(const AnsatzSpec& spec) {
  std::ostringstream os;
  os << "qubits " << spec.num_qubits << '\n';
  os << "reference " << spec.reference_bits << '\n';
  os << "form " << (spec.form == AnsatzForm::OrderedProduct ? "product" : "sum") << '\n';
  os << std::setprecision(17);
  for (const auto& g : spec.generators) {
    os << "generator\n";
    for (const auto& t : g.terms()) {
      os << t.coefficient();
      for (const auto& f : t.factors()) os << ' ' << axis_char(f.axis) << f.qubit;
      os << '\n';
    }
  }
  return os.str();
}

Ansatz::Ansatz(AnsatzSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  reference_ = basis_state(spec_.num_qubits, spec_.reference_bits);
  if (spec_.form == AnsatzForm::ExponentialOfSum) {
    dense_generators_.reserve(spec_.generators.size());
    for (const auto& g : spec_.generators) dense_generators_.push_back(to_dense(g));
  } else {
    generator_spectra_.reserve(spec_.generators.size());
    for (const auto& g : spec_.generators) generator_spectra_.push_back(eigendecompose(g));
  }
}

namespace {

// exp(i theta G)|v> from the spectrum of G.
ComplexVector apply_generator(const HermitianEigensystem& g, double theta, const ComplexVector& v) {
  ComplexVector coeffs = g.eigenvectors.adjoint() * v;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    coeffs[j] *= std::polar(1.0, theta * g.eigenvalues[j]);
  }
  return g.eigenvectors * coeffs;
}

}  // namespace

StateVector Ansatz::prepare(std::span<const double> theta) const {
  if (theta.size() != num_parameters()) {
    throw DimensionError("ansatz '" + spec_.name + "' takes " + std::to_string(num_parameters()) +
                         " parameters, got " + std::to_string(theta.size()));
  }
  if (spec_.form == AnsatzForm::OrderedProduct) {
    ComplexVector v = reference_.amplitudes();
    for (std::size_t k = theta.size(); k-- > 0;) {
      if (theta[k] != 0.0) v = apply_generator(generator_spectra_[k], theta[k], v);
    }
    return StateVector(spec_.num_qubits, std::move(v), true);
  }
  const auto dim = static_cast<Eigen::Index>(reference_.dimension());
  ComplexMatrix k = ComplexMatrix::Zero(dim, dim);
  bool any = false;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    if (theta[j] != 0.0) {
      k += theta[j] * dense_generators_[j];
      any = true;
    }
  }
  if (!any) return reference_;
  return StateVector(spec_.num_qubits, apply_generator(eigendecompose(k), 1.0, reference_.amplitudes()),
                     true);
}

StateVector prepare(const Ansatz& ansatz, std::span<const double> theta,
                    const std::optional<ParameterNoise>& noise, Rng* rng) {
  if (!noise) return ansatz.prepare(theta);
  if (noise->sigma < 0.0) throw DomainError("parameter noise sigma must be >= 0");
  if (rng == nullptr) throw DomainError("parameter noise requires an rng");
  std::vector<double> jittered(theta.begin(), theta.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& x : jittered) x += noise->sigma * normal(*rng);
  return ansatz.prepare(jittered);
}

ComplexMatrix ExcitationOp::unitary() const {
  if (!std::isfinite(angle)) throw DomainError("excitation angle must be finite");
  const PauliSum* g = &generator;
  const double w = angle;
  return antihermitian_exponential(std::span<const PauliSum>(g, 1), std::span<const double>(&w, 1));
}

ExcitationOp identity_excitation(int num_qubits) {
  return {PauliSum(num_qubits, {PauliTerm(1.0, {})}), 0.0};
}

StateVector apply_unitary(const StateVector& state, const ComplexMatrix& unitary) {
  if (static_cast<std::size_t>(unitary.rows()) != state.dimension() ||
      unitary.rows() != unitary.cols()) {
    throw DimensionError("unitary does not match the state dimension");
  }
  return StateVector(state.num_qubits(), unitary * state.amplitudes(), true);
}

StateVector apply_excitation(const StateVector& state, const ExcitationOp& op) {
  if (static_cast<std::size_t>(op.generator.num_qubits()) != static_cast<std::size_t>(state.num_qubits())) {
    throw DimensionError("excitation register does not match the state");
  }
  return apply_unitary(state, op.unitary());
}

TruncationResult truncate_ansatz(const AnsatzSpec& spec, std::span<const double> theta_g,
                                 const ExcitationOp& excitation, const EigenSubspace& target,
                                 double threshold) {
  spec.validate();
  if (theta_g.size() != spec.num_parameters()) {
    throw DimensionError("theta_g length does not match the generator count");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw DomainError("truncation threshold must lie in [0, 1]");
  }
  const ComplexMatrix exc = excitation.unitary();

  auto build = [&](const std::vector<std::size_t>& kept) {
    AnsatzSpec sub = spec;
    sub.generators.clear();
    std::vector<double> theta;
    for (auto k : kept) {
      sub.generators.push_back(spec.generators[k]);
      theta.push_back(theta_g[k]);
    }
    return std::pair{std::move(sub), std::move(theta)};
  };
  auto guess_fidelity = [&](const AnsatzSpec& sub, const std::vector<double>& theta) {
    const Ansatz a(sub);
    return subspace_fidelity(apply_unitary(a.prepare(theta), exc), target);
  };

  std::vector<std::size_t> kept(spec.num_parameters());
  for (std::size_t k = 0; k < kept.size(); ++k) kept[k] = k;

  TruncationResult result;
  result.spec = spec;
  result.theta.assign(theta_g.begin(), theta_g.end());
  result.guess_fidelity = guess_fidelity(spec, result.theta);
  if (result.guess_fidelity < threshold) {
    result.blocked = true;
    return result;
  }
  while (kept.size() > 1) {
    auto victim = std::min_element(kept.begin(), kept.end(), [&](std::size_t x, std::size_t y) {
      const double ax = std::abs(theta_g[x]);
      const double ay = std::abs(theta_g[y]);
      return ax < ay || (ax == ay && x < y);
    });
    std::vector<std::size_t> trial = kept;
    trial.erase(trial.begin() + (victim - kept.begin()));
    auto [sub, theta] = build(trial);
    const double f = guess_fidelity(sub, theta);
    if (f < threshold) break;
    result.removed.push_back(*victim);
    kept = std::move(trial);
    result.spec = std::move(sub);
    result.theta = std::move(theta);
    result.guess_fidelity = f;
  }
  return result;
}

}  // namespace waves
