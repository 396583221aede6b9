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

// waves: command-line runner for the eigenstate-witness workbench.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "waves/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<std::string> out;
  std::optional<int> workers;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "experiment configuration file");
  cmd->add_option("--seed", f.seed, "master seed (overrides run.seed)");
  cmd->add_option("--runs", f.runs, "independent runs (overrides run.runs)");
  cmd->add_option("--out", f.out, "output directory (overrides run.output)");
  cmd->add_option("--workers", f.workers, "parallel worker threads (overrides run.workers)");
}

int run_mode(waves::Mode mode, const Flags& f) {
  waves::ExperimentConfig config;
  if (!f.config.empty()) config = waves::load_experiment_config(f.config);
  config.mode = mode;
  if (f.seed) config.seed = *f.seed;
  if (f.runs) config.runs = *f.runs;
  if (f.out) config.output_dir = *f.out;
  if (f.workers) config.workers = *f.workers;
  config.validate();

  const auto start = std::chrono::steady_clock::now();
  const waves::BatchResult batch = waves::run_batch(config);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto files = waves::write_outputs(config, batch, wall);

  std::cout << waves::to_string(mode) << ": " << batch.successes << "/" << batch.runs.size()
            << " runs succeeded in " << wall << " s\n";
  for (const auto& r : batch.runs) {
    if (!r.ok) std::cerr << "run " << r.index << " failed: " << r.error << "\n";
    for (const auto& c : r.failed_checks) std::cerr << "run " << r.index << " check failed: " << c << "\n";
  }
  if (mode == waves::Mode::Spectrum) {
    std::cout << "eigenvalues:";
    for (double e : batch.eigenvalues) std::cout << " " << e;
    std::cout << "\n";
  }
  std::cout << "wrote " << files.size() << " files under " << config.output_dir.string() << "\n";
  return batch.checks_passed ? 0 : 1;
}

int validate(const std::string& hamiltonian, const std::string& ansatz, double tolerance) {
  const waves::PauliSum h = waves::load_hamiltonian(hamiltonian);
  std::cout << "qubits " << h.num_qubits() << "\nterms " << h.terms().size() << "\n";
  if (h.num_qubits() <= waves::kMaxDenseQubits) {
    const waves::SpectrumOracle oracle = waves::spectrum_oracle(h, tolerance);
    const auto& ev = oracle.eigensystem.eigenvalues;
    std::cout.precision(12);
    std::cout << "lowest " << ev[0] << "\nhighest " << ev[ev.size() - 1] << "\nsubspaces "
              << oracle.num_subspaces() << "\n";
    for (std::size_t k = 0; k < std::min<std::size_t>(oracle.num_subspaces(), 5); ++k) {
      std::cout << "  subspace " << k << ": eigenvalue " << oracle.subspaces[k].eigenvalue
                << ", dimension " << oracle.subspaces[k].basis.size() << "\n";
    }
  } else {
    std::cout << "spectrum skipped: register too large for dense diagonalization\n";
  }
  if (!ansatz.empty()) {
    const waves::AnsatzSpec spec = waves::load_ansatz(ansatz);
    if (spec.num_qubits != h.num_qubits()) {
      std::cerr << "ansatz acts on " << spec.num_qubits << " qubits, Hamiltonian on "
                << h.num_qubits() << "\n";
      return 1;
    }
    std::cout << "ansatz generators " << spec.num_parameters() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenstate-witness variational search and phase estimation"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    waves::Mode mode;
    const char* help;
  };
  const Sub subs[] = {
      {"ground", waves::Mode::Ground, "variational ground-state search"},
      {"excited", waves::Mode::Excited, "excitation plus purity-only refinement"},
      {"ipea", waves::Mode::Ipea, "iterative phase estimation"},
      {"rfpe", waves::Mode::Rfpe, "rejection-filter phase estimation"},
      {"folded", waves::Mode::Folded, "folded-spectrum baseline"},
      {"spectrum", waves::Mode::Spectrum, "exact spectrum of the configured Hamiltonian"},
      {"bench-noise", waves::Mode::BenchNoise, "parameter-noise sweep, full vs energy-only objective"},
  };
  Flags flags;
  std::optional<waves::Mode> chosen;
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_flags(cmd, flags);
    cmd->callback([&chosen, mode = s.mode] { chosen = mode; });
  }

  std::string ham_path;
  std::string ansatz_path;
  double tolerance = 1e-9;
  auto* val = app.add_subcommand("validate", "check a Hamiltonian (and ansatz) file");
  val->add_option("hamiltonian", ham_path, "Hamiltonian file")->required();
  val->add_option("--ansatz", ansatz_path, "ansatz file");
  val->add_option("--tolerance", tolerance, "degeneracy tolerance");

  CLI11_PARSE(app, argc, argv);
  try {
    if (chosen) return run_mode(*chosen, flags);
    return validate(ham_path, ansatz_path, tolerance);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
