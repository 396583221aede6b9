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

#include "waves/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "waves/rng.hpp"

namespace waves {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + num(v[i]);
  return out;
}

template <typename T>
std::string join_int(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

const char* kModeNames[] = {"ground", "excited", "ipea", "rfpe", "folded", "spectrum", "bench-noise"};

}  // namespace

std::string to_string(Mode mode) { return kModeNames[static_cast<int>(mode)]; }

Mode parse_mode(const std::string& name) {
  for (int i = 0; i < 7; ++i) {
    if (name == kModeNames[i]) return static_cast<Mode>(i);
  }
  throw DomainError("unknown mode '" + name + "'");
}

std::vector<std::string> ExperimentConfig::problems() const {
  std::vector<std::string> out;
  auto check = [&out](bool ok, const std::string& msg) {
    if (!ok) out.push_back(msg);
  };
  check(seed.has_value(), "run.seed is required (set it in the config or pass --seed)");
  check(runs >= 1, "run.runs must be >= 1");
  check(workers >= 1, "run.workers must be >= 1");
  using Kind = HamiltonianConfig::Kind;
  check(hamiltonian.kind != Kind::File || !hamiltonian.path.empty(),
        "hamiltonian.path is required for type = file");
  check(hamiltonian.kind != Kind::Random ||
            (hamiltonian.qubits >= 1 && hamiltonian.qubits <= kMaxDenseQubits),
        "hamiltonian.qubits must lie in [1, 12]");
  check(hamiltonian.kind != Kind::Random || hamiltonian.terms >= 0, "hamiltonian.terms must be >= 0");
  check(hamiltonian.degeneracy_tolerance >= 0.0, "hamiltonian.tolerance must be >= 0");
  check(!evolution_time || (std::isfinite(*evolution_time) && *evolution_time > 0.0),
        "evolution.time must be positive or auto");
  check(target_phase > 0.0, "evolution.target_phase must be positive");
  try {
    swarm.validate();
  } catch (const std::exception& e) {
    out.push_back(std::string("swarm: ") + e.what());
  }
  check(excitation.path.empty() || excitation.terms.empty(),
        "excitation.path and excitation.terms are mutually exclusive");
  check(std::isfinite(excitation.angle), "excitation.angle must be finite");
  check(!noise.tomography || noise.tomography->shots_per_basis >= 1, "noise.shots must be >= 1");
  check(!noise.parameters || noise.parameters->sigma >= 0.0, "noise.parameter_sigma must be >= 0");
  check(noise.evolution_phase_sigma >= 0.0, "noise.phase_sigma must be >= 0");
  check(ipea.options.m_bits >= 1 && ipea.options.m_bits <= 64, "ipea.bits must lie in [1, 64]");
  check(ipea.options.shots_per_bit >= 1, "ipea.shots must be >= 1");
  check(ipea.source == "eigenstate" || ipea.source == "ground",
        "ipea.source must be eigenstate or ground");
  check(rfpe.options.overlap_weight > 0.0 && rfpe.options.overlap_weight <= 1.0,
        "rfpe.weight must lie in (0, 1]");
  check(rfpe.options.epochs >= 0, "rfpe.epochs must be >= 0");
  check(rfpe.options.max_time > 0.0, "rfpe.max_time must be positive");
  check(rfpe.points >= 2, "rfpe.points must be >= 2");
  check(rfpe.window > 0.0, "rfpe.window must be positive");
  check(rfpe.options.time_factor > 0.0, "rfpe.time_factor must be positive");
  check(!rfpe.eigenstates.empty() && rfpe.eigenstates.size() == rfpe.populations.size(),
        "rfpe.eigenstates and rfpe.populations must be non-empty and equally long");
  check(!rfpe.prior_std || *rfpe.prior_std > 0.0, "rfpe.prior_std must be positive");
  check(std::isfinite(folded_epsilon), "folded.epsilon must be finite");
  check(mode != Mode::BenchNoise || !bench_sigmas.empty(), "bench.sigmas must not be empty");
  for (double s : bench_sigmas) check(s >= 0.0, "bench.sigmas must be >= 0");
  return out;
}

void ExperimentConfig::validate() const {
  const auto p = problems();
  if (p.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& s : p) msg += "\n  " + s;
  throw DomainError(msg);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("mode", to_string(mode));
  using Kind = HamiltonianConfig::Kind;
  const char* kinds[] = {"exciton", "file", "random"};
  e.emplace_back("hamiltonian.type", kinds[static_cast<int>(hamiltonian.kind)]);
  switch (hamiltonian.kind) {
    case Kind::Exciton:
      e.emplace_back("hamiltonian.alpha", num(hamiltonian.alpha));
      e.emplace_back("hamiltonian.beta", num(hamiltonian.beta));
      e.emplace_back("hamiltonian.shift", num(hamiltonian.shift));
      break;
    case Kind::File:
      e.emplace_back("hamiltonian.path", hamiltonian.path);
      break;
    case Kind::Random:
      e.emplace_back("hamiltonian.qubits", std::to_string(hamiltonian.qubits));
      e.emplace_back("hamiltonian.terms", std::to_string(hamiltonian.terms));
      e.emplace_back("hamiltonian.scale", num(hamiltonian.scale));
      e.emplace_back("hamiltonian.seed", std::to_string(hamiltonian.seed));
      break;
  }
  e.emplace_back("hamiltonian.tolerance", num(hamiltonian.degeneracy_tolerance));
  e.emplace_back("ansatz.path", ansatz.path.empty() ? "builtin" : ansatz.path);
  e.emplace_back("ansatz.theta_g", join(ansatz.theta_g));
  e.emplace_back("evolution.time", evolution_time ? num(*evolution_time) : "auto");
  e.emplace_back("evolution.target_phase", num(target_phase));
  e.emplace_back("swarm.particles", std::to_string(swarm.num_particles));
  e.emplace_back("swarm.survivors", std::to_string(swarm.survivor_count()));
  e.emplace_back("swarm.a", num(swarm.weight_a));
  e.emplace_back("swarm.b", num(swarm.weight_b));
  e.emplace_back("swarm.adaptive", swarm.adaptive ? "true" : "false");
  e.emplace_back("swarm.greedy", swarm.greedy ? "true" : "false");
  e.emplace_back("swarm.weighting",
                 swarm.weighting == SurvivorWeighting::Linear ? "linear" : "uniform");
  e.emplace_back("swarm.plateau", num(swarm.plateau_threshold));
  e.emplace_back("swarm.dispersion", num(swarm.dispersion_threshold));
  e.emplace_back("swarm.max_steps", std::to_string(swarm.max_steps));
  if (const auto* u = std::get_if<UniformInit>(&swarm.init)) {
    e.emplace_back("swarm.init", "uniform");
    e.emplace_back("swarm.lower", join(u->lower));
    e.emplace_back("swarm.upper", join(u->upper));
  } else {
    const auto& g = std::get<GaussianInit>(swarm.init);
    e.emplace_back("swarm.init", "gaussian");
    e.emplace_back("swarm.mean", join(g.mean));
    e.emplace_back("swarm.std", join(g.std));
  }
  e.emplace_back("excitation.path", excitation.path);
  e.emplace_back("excitation.terms", excitation.terms);
  e.emplace_back("excitation.angle", num(excitation.angle));
  e.emplace_back("excitation.target",
                 excitation.target_subspace ? std::to_string(*excitation.target_subspace) : "auto");
  e.emplace_back("noise.shots",
                 noise.tomography ? std::to_string(noise.tomography->shots_per_basis) : "none");
  e.emplace_back("noise.parameter_sigma", noise.parameters ? num(noise.parameters->sigma) : "none");
  e.emplace_back("noise.phase_sigma", num(noise.evolution_phase_sigma));
  e.emplace_back("ipea.bits", std::to_string(ipea.options.m_bits));
  e.emplace_back("ipea.shots", std::to_string(ipea.options.shots_per_bit));
  e.emplace_back("ipea.statistics", ipea.options.statistics_mode ? "true" : "false");
  e.emplace_back("ipea.source", ipea.source);
  e.emplace_back("ipea.eigenstate", std::to_string(ipea.eigenstate));
  e.emplace_back("rfpe.weight", num(rfpe.options.overlap_weight));
  e.emplace_back("rfpe.epochs", std::to_string(rfpe.options.epochs));
  e.emplace_back("rfpe.max_time", num(rfpe.options.max_time));
  e.emplace_back("rfpe.time_factor", num(rfpe.options.time_factor));
  e.emplace_back("rfpe.sample_phase", rfpe.options.sample_phase ? "true" : "false");
  e.emplace_back("rfpe.points", std::to_string(rfpe.points));
  e.emplace_back("rfpe.window", num(rfpe.window));
  e.emplace_back("rfpe.eigenstates", join_int(rfpe.eigenstates));
  e.emplace_back("rfpe.populations", join(rfpe.populations));
  e.emplace_back("rfpe.prior_mean", rfpe.prior_mean ? num(*rfpe.prior_mean) : "auto");
  e.emplace_back("rfpe.prior_std", rfpe.prior_std ? num(*rfpe.prior_std) : "auto");
  e.emplace_back("folded.epsilon", num(folded_epsilon));
  e.emplace_back("folded.theta_init", join(folded_theta_init));
  e.emplace_back("bench.sigmas", join(bench_sigmas));
  e.emplace_back("bench.evolution_noise", bench_evolution_noise ? "true" : "false");
  e.emplace_back("run.seed", seed ? std::to_string(*seed) : "unset");
  e.emplace_back("run.runs", std::to_string(runs));
  return e;
}

namespace {

// Collects conversion failures so that every bad key is reported at once.
class Reader {
 public:
  explicit Reader(const boost::property_tree::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    const auto v = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return *v;
  }

  void real(const std::string& key, double& out) {
    if (auto v = raw(key)) out = to_real(key, *v);
  }
  void real(const std::string& key, std::optional<double>& out, const char* automatic) {
    if (auto v = raw(key)) {
      if (*v == automatic) {
        out.reset();
      } else {
        out = to_real(key, *v);
      }
    }
  }
  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (auto v = raw(key)) {
      try {
        std::size_t pos = 0;
        const long long x = std::stoll(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("trailing");
        out = static_cast<Int>(x);
      } catch (const std::exception&) {
        errors.push_back(key + ": expected an integer, got '" + *v + "'");
      }
    }
  }
  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (auto v = raw(key)) {
      try {
        std::size_t pos = 0;
        out = std::stoull(*v, &pos);
        if (pos != v->size() || v->front() == '-') throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        errors.push_back(key + ": expected an unsigned integer, got '" + *v + "'");
      }
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (auto v = raw(key)) {
      if (*v == "true" || *v == "1" || *v == "yes") {
        out = true;
      } else if (*v == "false" || *v == "0" || *v == "no") {
        out = false;
      } else {
        errors.push_back(key + ": expected true or false, got '" + *v + "'");
      }
    }
  }
  void text(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }
  void reals(const std::string& key, std::vector<double>& out) {
    if (auto v = raw(key)) {
      out.clear();
      std::string s = *v;
      std::replace(s.begin(), s.end(), ',', ' ');
      std::istringstream in(s);
      std::string tok;
      while (in >> tok) out.push_back(to_real(key, tok));
    }
  }
  void indices(const std::string& key, std::vector<std::size_t>& out) {
    std::vector<double> tmp;
    reals(key, tmp);
    if (tmp.empty()) return;
    out.clear();
    for (double x : tmp) {
      if (x < 0 || x != std::floor(x)) {
        errors.push_back(key + ": expected non-negative integers");
        return;
      }
      out.push_back(static_cast<std::size_t>(x));
    }
  }

  std::vector<std::string> unknown_keys() const {
    std::vector<std::string> out;
    for (const auto& [section, body] : tree_) {
      if (body.empty()) {
        out.push_back(section + ": keys must live inside a [section]");
        continue;
      }
      for (const auto& kv : body) {
        const std::string key = section + "." + kv.first;
        if (!used_.count(key)) out.push_back(key + ": unknown key");
      }
    }
    return out;
  }

  std::vector<std::string> errors;

 private:
  double to_real(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return x;
    } catch (const std::exception&) {
      errors.push_back(key + ": expected a number, got '" + v + "'");
      return 0.0;
    }
  }

  const boost::property_tree::ptree& tree_;
  std::set<std::string> used_;
};

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, ExperimentConfig base) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(e.line(), e.message());
  }
  Reader r(tree);
  ExperimentConfig& c = base;

  if (auto kind = r.raw("hamiltonian.type")) {
    using Kind = HamiltonianConfig::Kind;
    if (*kind == "exciton") {
      c.hamiltonian.kind = Kind::Exciton;
    } else if (*kind == "file") {
      c.hamiltonian.kind = Kind::File;
    } else if (*kind == "random") {
      c.hamiltonian.kind = Kind::Random;
    } else {
      r.errors.push_back("hamiltonian.type: expected exciton, file or random");
    }
  }
  r.real("hamiltonian.alpha", c.hamiltonian.alpha);
  r.real("hamiltonian.beta", c.hamiltonian.beta);
  r.real("hamiltonian.shift", c.hamiltonian.shift);
  r.text("hamiltonian.path", c.hamiltonian.path);
  r.integer("hamiltonian.qubits", c.hamiltonian.qubits);
  r.integer("hamiltonian.terms", c.hamiltonian.terms);
  r.real("hamiltonian.scale", c.hamiltonian.scale);
  r.unsigned64("hamiltonian.seed", c.hamiltonian.seed);
  r.real("hamiltonian.tolerance", c.hamiltonian.degeneracy_tolerance);

  r.text("ansatz.path", c.ansatz.path);
  if (c.ansatz.path == "builtin") c.ansatz.path.clear();
  r.reals("ansatz.theta_g", c.ansatz.theta_g);

  r.real("evolution.time", c.evolution_time, "auto");
  r.real("evolution.target_phase", c.target_phase);

  r.integer("swarm.particles", c.swarm.num_particles);
  if (auto v = r.raw("swarm.survivors")) {
    if (*v == "auto") {
      c.swarm.survivors.reset();
    } else {
      int s = 0;
      r.integer("swarm.survivors", s);
      c.swarm.survivors = s;
    }
  }
  r.real("swarm.a", c.swarm.weight_a);
  r.real("swarm.b", c.swarm.weight_b);
  r.boolean("swarm.adaptive", c.swarm.adaptive);
  r.boolean("swarm.greedy", c.swarm.greedy);
  if (auto v = r.raw("swarm.weighting")) {
    if (*v == "linear") {
      c.swarm.weighting = SurvivorWeighting::Linear;
    } else if (*v == "uniform") {
      c.swarm.weighting = SurvivorWeighting::Uniform;
    } else {
      r.errors.push_back("swarm.weighting: expected linear or uniform");
    }
  }
  r.real("swarm.plateau", c.swarm.plateau_threshold);
  r.real("swarm.dispersion", c.swarm.dispersion_threshold);
  r.integer("swarm.max_steps", c.swarm.max_steps);
  r.integer("swarm.threads", c.swarm.eval_threads);
  {
    std::string init = std::holds_alternative<UniformInit>(c.swarm.init) ? "uniform" : "gaussian";
    r.text("swarm.init", init);
    if (init == "uniform") {
      UniformInit u = std::holds_alternative<UniformInit>(c.swarm.init)
                          ? std::get<UniformInit>(c.swarm.init)
                          : UniformInit{{0.0}, {6.283185307179586}};
      r.reals("swarm.lower", u.lower);
      r.reals("swarm.upper", u.upper);
      c.swarm.init = u;
    } else if (init == "gaussian") {
      GaussianInit g = std::holds_alternative<GaussianInit>(c.swarm.init)
                           ? std::get<GaussianInit>(c.swarm.init)
                           : GaussianInit{{0.0}, {1.0}};
      r.reals("swarm.mean", g.mean);
      r.reals("swarm.std", g.std);
      c.swarm.init = g;
    } else {
      r.errors.push_back("swarm.init: expected uniform or gaussian");
    }
    // Mark the keys of the other family as known.
    r.raw("swarm.lower");
    r.raw("swarm.upper");
    r.raw("swarm.mean");
    r.raw("swarm.std");
  }

  r.text("excitation.path", c.excitation.path);
  r.text("excitation.terms", c.excitation.terms);
  r.real("excitation.angle", c.excitation.angle);
  if (auto v = r.raw("excitation.target")) {
    if (*v == "auto") {
      c.excitation.target_subspace.reset();
    } else {
      std::size_t k = 0;
      r.integer("excitation.target", k);
      c.excitation.target_subspace = k;
    }
  }

  if (auto v = r.raw("noise.shots")) {
    if (*v == "none") {
      c.noise.tomography.reset();
    } else {
      int shots = 0;
      r.integer("noise.shots", shots);
      c.noise.tomography = NoisyTomography{shots};
    }
  }
  if (auto v = r.raw("noise.parameter_sigma")) {
    if (*v == "none") {
      c.noise.parameters.reset();
    } else {
      double s = 0.0;
      r.real("noise.parameter_sigma", s);
      c.noise.parameters = ParameterNoise{s};
    }
  }
  r.real("noise.phase_sigma", c.noise.evolution_phase_sigma);

  r.integer("ipea.bits", c.ipea.options.m_bits);
  r.integer("ipea.shots", c.ipea.options.shots_per_bit);
  r.boolean("ipea.statistics", c.ipea.options.statistics_mode);
  r.text("ipea.source", c.ipea.source);
  r.integer("ipea.eigenstate", c.ipea.eigenstate);

  r.real("rfpe.weight", c.rfpe.options.overlap_weight);
  r.integer("rfpe.epochs", c.rfpe.options.epochs);
  r.real("rfpe.max_time", c.rfpe.options.max_time);
  r.real("rfpe.time_factor", c.rfpe.options.time_factor);
  r.boolean("rfpe.sample_phase", c.rfpe.options.sample_phase);
  r.integer("rfpe.points", c.rfpe.points);
  r.real("rfpe.window", c.rfpe.window);
  r.indices("rfpe.eigenstates", c.rfpe.eigenstates);
  r.reals("rfpe.populations", c.rfpe.populations);
  r.real("rfpe.prior_mean", c.rfpe.prior_mean, "auto");
  r.real("rfpe.prior_std", c.rfpe.prior_std, "auto");

  r.real("folded.epsilon", c.folded_epsilon);
  r.reals("folded.theta_init", c.folded_theta_init);
  r.reals("bench.sigmas", c.bench_sigmas);
  r.boolean("bench.evolution_noise", c.bench_evolution_noise);

  if (auto v = r.raw("run.seed")) {
    std::uint64_t s = 0;
    r.unsigned64("run.seed", s);
    c.seed = s;
  }
  r.integer("run.runs", c.runs);
  r.integer("run.workers", c.workers);
  if (auto v = r.raw("run.output")) c.output_dir = *v;

  auto errors = r.errors;
  for (auto& u : r.unknown_keys()) errors.push_back(std::move(u));
  if (!errors.empty()) {
    std::string msg = "invalid configuration file:";
    for (const auto& s : errors) msg += "\n  " + s;
    throw DomainError(msg);
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_experiment_config(ss.str(), std::move(base));
  } catch (const ParseError& e) {
    throw e.in(path.string());
  }
}

Problem build_problem(const ExperimentConfig& config) {
  using Kind = HamiltonianConfig::Kind;
  PauliSum h = [&] {
    switch (config.hamiltonian.kind) {
      case Kind::File:
        return load_hamiltonian(config.hamiltonian.path);
      case Kind::Random:
        return random_hamiltonian(config.hamiltonian.qubits,
                                  static_cast<std::size_t>(config.hamiltonian.terms),
                                  config.hamiltonian.scale, config.hamiltonian.seed);
      case Kind::Exciton:
        break;
    }
    return exciton_hamiltonian(config.hamiltonian.alpha, config.hamiltonian.beta,
                               config.hamiltonian.shift);
  }();
  SpectrumOracle oracle = spectrum_oracle(h, config.hamiltonian.degeneracy_tolerance);
  const int n = h.num_qubits();

  AnsatzSpec spec;
  if (config.ansatz.path.empty()) {
    if (n != 1) {
      throw DomainError("the built-in ansatz acts on one qubit; set ansatz.path for " +
                        std::to_string(n) + " qubits");
    }
    spec = single_qubit_rotation_ansatz();
  } else {
    spec = load_ansatz(config.ansatz.path);
  }
  if (spec.num_qubits != n) throw DimensionError("ansatz and Hamiltonian registers differ");

  ExcitationOp excitation = identity_excitation(n);
  excitation.angle = config.excitation.angle;
  if (!config.excitation.path.empty()) {
    excitation.generator = load_hamiltonian(config.excitation.path);
  } else if (!config.excitation.terms.empty()) {
    std::string text = "qubits " + std::to_string(n) + "\n" + config.excitation.terms;
    std::replace(text.begin(), text.end(), ';', '\n');
    excitation.generator = parse_pauli_sum(text);
  }
  if (excitation.generator.num_qubits() != n) {
    throw DimensionError("excitation and Hamiltonian registers differ");
  }

  double t = 0.0;
  if (config.evolution_time) {
    t = *config.evolution_time;
  } else {
    EvolutionTimeStrategy strategy;
    strategy.target_phase = config.target_phase;
    t = choose_evolution_time(oracle.eigensystem, strategy);
  }
  ComplexMatrix dense = to_dense(h);
  return Problem{std::move(h), std::move(oracle), std::move(dense), Ansatz(std::move(spec)),
                 std::move(excitation), t};
}

namespace {

std::vector<std::string> row(std::initializer_list<std::string> cells) { return cells; }

Table swarm_trace(const SearchResult& r, const std::string& stage) {
  Table t;
  t.columns = {"stage", "step", "mean_fobj", "best_fobj", "max_std", "fidelity", "trial_states"};
  for (const auto& rec : r.records()) {
    t.rows.push_back(row({stage, std::to_string(rec.step), num(rec.mean_fobj), num(rec.best_fobj),
                          num(rec.max_std), rec.fidelity ? num(*rec.fidelity) : "nan",
                          std::to_string(static_cast<std::size_t>(rec.step) *
                                         static_cast<std::size_t>(r.num_particles))}));
  }
  return t;
}

void append(Table& into, const Table& more) {
  if (into.columns.empty()) into.columns = more.columns;
  into.rows.insert(into.rows.end(), more.rows.begin(), more.rows.end());
}

void record_search(RunOutcome& out, const SearchResult& r, const std::string& prefix) {
  out.scalars[prefix + "steps"] = r.steps;
  out.scalars[prefix + "trial_states"] = static_cast<double>(r.trial_states());
  out.scalars[prefix + "final_fidelity"] = r.final_fidelity();
  out.scalars[prefix + "purity_evaluations"] = static_cast<double>(r.purity_evaluations);
  out.scalars[prefix + "energy_evaluations"] = static_cast<double>(r.energy_evaluations);
  out.labels[prefix + "convergence"] = to_string(r.convergence_reason);
  if (r.target_subspace) out.scalars[prefix + "target_subspace"] = static_cast<double>(*r.target_subspace);
  if (r.trial_states() != static_cast<std::size_t>(r.num_particles) * r.fobj_trace.size()) {
    out.failed_checks.push_back(prefix + "trial-state count differs from N x steps");
  }
  if (!r.subspace_fidelity_trace.empty()) {
    double sum = 0.0;
    for (double f : r.subspace_fidelity_trace.back()) sum += f;
    if (std::abs(sum - 1.0) > 1e-8) out.failed_checks.push_back(prefix + "subspace fidelities do not sum to 1");
  }
}

void set_final_state(RunOutcome& out, const SpectrumOracle& oracle, const StateVector& state) {
  out.subspace_fidelities = oracle.subspace_fidelities(state);
  out.collapsed_subspace = static_cast<std::size_t>(
      std::max_element(out.subspace_fidelities.begin(), out.subspace_fidelities.end()) -
      out.subspace_fidelities.begin());
}

SwarmConfig seeded(const SwarmConfig& base, std::uint64_t seed, std::uint64_t stage) {
  SwarmConfig c = base;
  c.seed = derive_seed(seed, stage);
  return c;
}

void run_ground(const ExperimentConfig& c, const Problem& p, std::uint64_t seed, RunOutcome& out) {
  const SearchResult r = run_ground_search(p.oracle.eigensystem, p.ansatz, p.t,
                                           seeded(c.swarm, seed, 1), c.noise, &p.oracle);
  out.trace = swarm_trace(r, "ground");
  out.series = r.fidelity_trace;
  record_search(out, r, "");
  set_final_state(out, p.oracle, p.ansatz.prepare(r.theta_best));
  ControlQubitState rho = control_density(p.ansatz.prepare(r.theta_best), p.oracle.eigensystem, p.t);
  try {
    out.scalars["energy_estimate"] = energy_estimator(rho, p.t);
  } catch (const PhaseUndefinedError&) {
    out.scalars["energy_estimate"] = std::nan("");
  }
}

std::vector<double> ground_parameters(const ExperimentConfig& c, const Problem& p,
                                      std::uint64_t seed, RunOutcome& out) {
  if (!c.ansatz.theta_g.empty()) {
    if (c.ansatz.theta_g.size() != p.ansatz.num_parameters()) {
      throw DimensionError("ansatz.theta_g length does not match the ansatz");
    }
    return c.ansatz.theta_g;
  }
  const SearchResult g = run_ground_search(p.oracle.eigensystem, p.ansatz, p.t,
                                           seeded(c.swarm, seed, 1), c.noise, &p.oracle);
  append(out.trace, swarm_trace(g, "ground"));
  record_search(out, g, "ground_");
  return g.theta_best;
}

void run_excited(const ExperimentConfig& c, const Problem& p, std::uint64_t seed, RunOutcome& out) {
  const auto theta_g = ground_parameters(c, p, seed, out);
  const SearchResult r =
      run_excited_search(p.oracle.eigensystem, p.ansatz, theta_g, p.excitation, p.t,
                         seeded(c.swarm, seed, 2), c.noise, &p.oracle, c.excitation.target_subspace);
  append(out.trace, swarm_trace(r, "excited"));
  out.series = r.fidelity_trace;
  record_search(out, r, "");
  set_final_state(out, p.oracle, apply_excitation(p.ansatz.prepare(r.theta_best), p.excitation));
}

void run_folded(const ExperimentConfig& c, const Problem& p, std::uint64_t seed, RunOutcome& out) {
  std::vector<double> theta = c.folded_theta_init;
  if (theta.empty()) theta = c.ansatz.theta_g;
  if (theta.empty()) theta.assign(p.ansatz.num_parameters(), 0.0);
  FoldedConfig fc{c.folded_epsilon, seeded(c.swarm, seed, 3)};
  const SearchResult r = run_folded_search(p.dense, p.ansatz, theta, p.excitation, fc, c.noise,
                                           &p.oracle, c.excitation.target_subspace);
  out.trace = swarm_trace(r, "folded");
  out.series = r.fidelity_trace;
  record_search(out, r, "");
  set_final_state(out, p.oracle, apply_excitation(p.ansatz.prepare(r.theta_best), p.excitation));
}

void run_ipea_mode(const ExperimentConfig& c, const Problem& p, std::uint64_t seed,
                   RunOutcome& out) {
  std::optional<StateVector> state;
  bool exact_eigenstate = false;
  if (c.ipea.source == "ground") {
    const SearchResult g = run_ground_search(p.oracle.eigensystem, p.ansatz, p.t,
                                             seeded(c.swarm, seed, 1), c.noise, &p.oracle);
    record_search(out, g, "ground_");
    state = p.ansatz.prepare(g.theta_best);
  } else {
    if (c.ipea.eigenstate >= p.oracle.eigensystem.dimension()) {
      throw DomainError("ipea.eigenstate exceeds the Hilbert-space dimension");
    }
    state = eigenstate(p.oracle.eigensystem, c.ipea.eigenstate);
    exact_eigenstate = true;
  }
  Rng rng = make_rng(seed, 4);
  const IpeaResult r = ipea(*state, p.oracle.eigensystem, p.t, c.ipea.options, rng);
  std::vector<int> expected;
  if (exact_eigenstate) {
    expected = rounded_phase_bits(
        p.oracle.eigensystem.eigenvalues[static_cast<Eigen::Index>(c.ipea.eigenstate)], p.t,
        c.ipea.options.m_bits);
  }
  out.trace.columns = {"position", "bit", "zeros", "ones", "expected"};
  std::string bits;
  for (std::size_t i = 0; i < r.bits.size(); ++i) {
    bits += static_cast<char>('0' + r.bits[i]);
    out.trace.rows.push_back(row({std::to_string(i + 1), std::to_string(r.bits[i]),
                                  std::to_string(r.per_bit_counts[i].first),
                                  std::to_string(r.per_bit_counts[i].second),
                                  expected.empty() ? "" : std::to_string(expected[i])}));
  }
  out.labels["bits"] = bits;
  out.scalars["phase_fraction"] = r.phase_fraction;
  out.scalars["eigenvalue_estimate"] = r.eigenvalue_estimate;
  // Compare modulo the 2 pi / t aliasing of the phase.
  const double period = 2.0 * std::numbers::pi / p.t;
  double err = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < p.oracle.eigensystem.eigenvalues.size(); ++j) {
    const double d = std::remainder(r.eigenvalue_estimate - p.oracle.eigensystem.eigenvalues[j], period);
    err = std::min(err, std::abs(d));
  }
  out.scalars["nearest_eigenvalue_error"] = err;
  out.series = {err};
  if (!expected.empty()) {
    out.scalars["bits_match"] = expected == r.bits ? 1.0 : 0.0;
    if (!c.ipea.options.statistics_mode && c.ipea.options.shots_per_bit >= 1 && expected != r.bits &&
        c.noise.evolution_phase_sigma == 0.0) {
      out.failed_checks.push_back("noiseless eigenstate readout differs from the exact bits");
    }
  }
  set_final_state(out, p.oracle, r.final_state);
}

void run_rfpe_mode(const ExperimentConfig& c, const Problem& p, std::uint64_t seed,
                   RunOutcome& out) {
  std::vector<double> lambdas;
  for (auto k : c.rfpe.eigenstates) {
    if (k >= p.oracle.eigensystem.dimension()) {
      throw DomainError("rfpe.eigenstates index exceeds the Hilbert-space dimension");
    }
    lambdas.push_back(p.oracle.eigensystem.eigenvalues[static_cast<Eigen::Index>(k)]);
  }
  double mean = 0.0;
  for (std::size_t j = 0; j < lambdas.size(); ++j) mean += c.rfpe.populations[j] * lambdas[j];
  const auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
  const double spread = std::max(*hi - *lo, 1e-3);
  RfpePrior prior(c.rfpe.prior_mean.value_or(mean), c.rfpe.prior_std.value_or(spread), c.rfpe.points,
                  c.rfpe.window);
  Rng rng = make_rng(seed, 5);
  const RfpeTrace trace = rfpe_run(lambdas, c.rfpe.populations, prior, c.rfpe.options, rng);
  out.trace.columns = {"epoch", "time", "phase", "posterior_mean", "posterior_std", "error"};
  for (const auto& e : trace.epochs) {
    out.trace.rows.push_back(row({std::to_string(e.epoch), num(e.time), num(e.phase),
                                  num(e.posterior_mean), num(e.posterior_std), num(e.error)}));
    out.series.push_back(e.error);
  }
  const double final_mean = trace.epochs.empty() ? prior.mean() : trace.epochs.back().posterior_mean;
  std::size_t selected = 0;
  for (std::size_t j = 1; j < lambdas.size(); ++j) {
    if (std::abs(lambdas[j] - final_mean) < std::abs(lambdas[selected] - final_mean)) selected = j;
  }
  out.scalars["initial_error"] = trace.initial_error;
  out.scalars["final_error"] = trace.final_error();
  out.scalars["final_mean"] = final_mean;
  out.scalars["selected_eigenstate"] = static_cast<double>(c.rfpe.eigenstates[selected]);
  out.scalars["reinitializations"] = trace.reinitializations;
  out.collapsed_subspace = p.oracle.subspace_of[c.rfpe.eigenstates[selected]];
}

void run_spectrum(const Problem& p, RunOutcome& out) {
  out.trace.columns = {"index", "eigenvalue", "subspace"};
  const auto& ev = p.oracle.eigensystem.eigenvalues;
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    out.trace.rows.push_back(row({std::to_string(k), num(ev[j]), std::to_string(p.oracle.subspace_of[k])}));
  }
  out.scalars["num_subspaces"] = static_cast<double>(p.oracle.num_subspaces());
  out.scalars["num_qubits"] = p.hamiltonian.num_qubits();
  out.scalars["num_terms"] = static_cast<double>(p.hamiltonian.terms().size());
}

// Bench-noise runs are laid out as (sigma, method, repeat) with the method
// index 0 for the full objective and 1 for the energy-only objective.
struct BenchJob {
  std::size_t sigma;
  int method;
  std::size_t repeat;
};

BenchJob bench_job(const ExperimentConfig& c, std::size_t index) {
  const auto per_sigma = static_cast<std::size_t>(2 * c.runs);
  return {index / per_sigma, static_cast<int>((index % per_sigma) / static_cast<std::size_t>(c.runs)),
          index % static_cast<std::size_t>(c.runs)};
}

void run_bench(const ExperimentConfig& c, const Problem& p, std::size_t index, std::uint64_t seed,
               RunOutcome& out) {
  const BenchJob job = bench_job(c, index);
  NoiseModel noise = c.noise;
  noise.parameters = ParameterNoise{c.bench_sigmas[job.sigma]};
  if (c.bench_evolution_noise) noise.evolution_phase_sigma = c.bench_sigmas[job.sigma];
  const SwarmConfig cfg = seeded(c.swarm, seed, 1);
  const SearchResult r = job.method == 0
                             ? run_ground_search(p.oracle.eigensystem, p.ansatz, p.t, cfg, noise, &p.oracle)
                             : run_energy_only_search(p.oracle.eigensystem, p.ansatz, p.t, cfg, noise, &p.oracle);
  out.trace = swarm_trace(r, job.method == 0 ? "fobj" : "energy");
  out.series = r.fidelity_trace;
  record_search(out, r, "");
  out.scalars["sigma"] = c.bench_sigmas[job.sigma];
  out.labels["method"] = job.method == 0 ? "fobj" : "energy";
  set_final_state(out, p.oracle, p.ansatz.prepare(r.theta_best));
}

std::size_t job_count(const ExperimentConfig& c) {
  if (c.mode == Mode::Spectrum) return 1;
  if (c.mode == Mode::BenchNoise) return c.bench_sigmas.size() * 2 * static_cast<std::size_t>(c.runs);
  return static_cast<std::size_t>(c.runs);
}

}  // namespace

RunOutcome run_once(const ExperimentConfig& config, const Problem& problem, std::size_t index,
                    std::uint64_t seed) {
  RunOutcome out;
  out.index = index;
  out.seed = seed;
  try {
    switch (config.mode) {
      case Mode::Ground:
        run_ground(config, problem, seed, out);
        break;
      case Mode::Excited:
        run_excited(config, problem, seed, out);
        break;
      case Mode::Ipea:
        run_ipea_mode(config, problem, seed, out);
        break;
      case Mode::Rfpe:
        run_rfpe_mode(config, problem, seed, out);
        break;
      case Mode::Folded:
        run_folded(config, problem, seed, out);
        break;
      case Mode::Spectrum:
        run_spectrum(problem, out);
        break;
      case Mode::BenchNoise:
        run_bench(config, problem, index, seed, out);
        break;
    }
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

// Per-step statistics of the run series; shorter series are held at their
// final value.
Table aggregate_series(const std::vector<const RunOutcome*>& runs, const std::string& key,
                       const std::string& value) {
  Table t;
  t.columns = {key, "mean", "median", "p16.25", "p83.75", "count"};
  if (!value.empty()) t.columns.insert(t.columns.begin(), "group");
  std::size_t longest = 0;
  for (const auto* r : runs) longest = std::max(longest, r->series.size());
  for (std::size_t s = 0; s < longest; ++s) {
    std::vector<double> xs;
    for (const auto* r : runs) {
      if (r->series.empty()) continue;
      xs.push_back(r->series[std::min(s, r->series.size() - 1)]);
    }
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    std::vector<std::string> cells = {std::to_string(s + 1), num(mean), num(percentile(xs, 50.0)),
                                      num(percentile(xs, 16.25)), num(percentile(xs, 83.75)),
                                      std::to_string(xs.size())};
    if (!value.empty()) cells.insert(cells.begin(), value);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace

BatchResult run_batch(const ExperimentConfig& config) {
  config.validate();
  const Problem problem = build_problem(config);
  const std::size_t jobs = job_count(config);
  BatchResult batch;
  batch.runs.resize(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      batch.runs[i] = run_once(config, problem, i, derive_seed(*config.seed, i));
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(config.workers), jobs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
  }

  for (Eigen::Index j = 0; j < problem.oracle.eigensystem.eigenvalues.size(); ++j) {
    batch.eigenvalues.push_back(problem.oracle.eigensystem.eigenvalues[j]);
  }
  std::vector<const RunOutcome*> ok;
  for (const auto& r : batch.runs) {
    if (r.ok) ok.push_back(&r);
    if (!r.ok || !r.failed_checks.empty()) batch.checks_passed = false;
  }
  batch.successes = ok.size();

  const std::string key = config.mode == Mode::Rfpe ? "epoch" : "step";
  if (config.mode == Mode::BenchNoise) {
    for (std::size_t s = 0; s < config.bench_sigmas.size(); ++s) {
      for (int m = 0; m < 2; ++m) {
        std::vector<const RunOutcome*> group;
        for (const auto* r : ok) {
          const BenchJob job = bench_job(config, r->index);
          if (job.sigma == s && job.method == m) group.push_back(r);
        }
        append(batch.aggregate, aggregate_series(group, key, num(config.bench_sigmas[s]) +
                                                                  (m == 0 ? "/fobj" : "/energy")));
      }
    }
  } else if (config.mode != Mode::Spectrum) {
    batch.aggregate = aggregate_series(ok, key, "");
  }

  batch.collapse.columns = {"subspace", "eigenvalue", "dimension", "count", "frequency"};
  std::vector<std::size_t> counts(problem.oracle.num_subspaces(), 0);
  std::size_t total = 0;
  for (const auto* r : ok) {
    if (r->collapsed_subspace) {
      ++counts[*r->collapsed_subspace];
      ++total;
    }
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const auto& sub = problem.oracle.subspaces[k];
    batch.collapse.rows.push_back(
        row({std::to_string(k), num(sub.eigenvalue), std::to_string(sub.basis.size()),
             std::to_string(counts[k]),
             num(total == 0 ? 0.0 : static_cast<double>(counts[k]) / static_cast<double>(total))}));
  }
  return batch;
}

std::string to_csv(const Table& table, const std::vector<std::pair<std::string, std::string>>& echo,
                   std::uint64_t seed) {
  std::ostringstream out;
  out << "# waves trace; seed " << seed << "\n";
  for (const auto& [k, v] : echo) out << "# " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << "\n";
  }
  return out.str();
}

std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const BatchResult& batch, double wall_seconds) {
  namespace fs = std::filesystem;
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  const auto echo = config.echo();
  const std::string mode = to_string(config.mode);
  std::vector<fs::path> written;
  auto write = [&](const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    written.push_back(path);
  };

  const bool single = batch.runs.size() == 1;
  if (!single) fs::create_directories(dir / "runs");
  for (const auto& r : batch.runs) {
    if (!r.ok) continue;
    char name[64];
    std::snprintf(name, sizeof name, "%s_run%04zu.csv", mode.c_str(), r.index);
    write(single ? dir / (mode + "_trace.csv") : dir / "runs" / name, to_csv(r.trace, echo, r.seed));
  }
  if (!batch.aggregate.columns.empty()) {
    write(dir / (mode + "_aggregate.csv"), to_csv(batch.aggregate, echo, *config.seed));
  }
  if (config.mode != Mode::Spectrum) {
    write(dir / (mode + "_collapse.csv"), to_csv(batch.collapse, echo, *config.seed));
  }

  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["mode"] = mode;
  j["seed"] = *config.seed;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : echo) cfg[k] = v;
  j["config"] = cfg;
  j["eigenvalues"] = batch.eigenvalues;
  j["runs_total"] = batch.runs.size();
  j["runs_succeeded"] = batch.successes;
  j["checks_passed"] = batch.checks_passed;
  auto finite = [](double x) -> nlohmann::ordered_json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& r : batch.runs) {
    nlohmann::ordered_json e;
    e["index"] = r.index;
    e["seed"] = r.seed;
    e["ok"] = r.ok;
    if (!r.ok) e["error"] = r.error;
    for (const auto& [k, v] : r.scalars) e[k] = finite(v);
    for (const auto& [k, v] : r.labels) e[k] = v;
    if (!r.subspace_fidelities.empty()) e["subspace_fidelities"] = r.subspace_fidelities;
    if (r.collapsed_subspace) e["collapsed_subspace"] = *r.collapsed_subspace;
    if (!r.failed_checks.empty()) e["failed_checks"] = r.failed_checks;
    runs.push_back(std::move(e));
  }
  j["runs"] = std::move(runs);
  if (!batch.aggregate.rows.empty()) {
    // Final-row statistics of the aggregate series.
    std::vector<double> finals;
    for (const auto& r : batch.runs) {
      if (r.ok && !r.series.empty()) finals.push_back(r.series.back());
    }
    if (!finals.empty()) {
      j["final_series"] = {
          {"mean", std::accumulate(finals.begin(), finals.end(), 0.0) / static_cast<double>(finals.size())},
          {"median", percentile(finals, 50.0)},
          {"p16.25", percentile(finals, 16.25)},
          {"p83.75", percentile(finals, 83.75)}};
    }
  }
  j["wall_time_seconds"] = wall_seconds;
  write(dir / "summary.json", j.dump(2) + "\n");
  return written;
}

}  // namespace waves
