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

#include "waves/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "waves/rng.hpp"

namespace waves {

int SwarmConfig::survivor_count() const {
  if (survivors) return *survivors;
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_particles))));
}

void SwarmConfig::validate() const {
  if (num_particles < 1) throw DomainError("swarm needs at least one particle");
  const int s = survivor_count();
  if (s < 1 || s > num_particles) throw DomainError("survivor count must lie in [1, N]");
  if (weight_a < 0.0 || weight_b < 0.0 || (weight_a == 0.0 && weight_b == 0.0)) {
    throw DomainError("objective weights must be non-negative and not both zero");
  }
  if (!(plateau_threshold > 0.0)) throw DomainError("plateau threshold must be positive");
  if (!(dispersion_threshold > 0.0)) throw DomainError("dispersion threshold must be positive");
  if (max_steps < 1) throw DomainError("max_steps must be positive");
  if (eval_threads < 1) throw DomainError("eval_threads must be positive");
}

std::string to_string(ConvergenceReason reason) {
  switch (reason) {
    case ConvergenceReason::Dispersion:
      return "dispersion";
    case ConvergenceReason::Plateau:
      return "plateau";
    case ConvergenceReason::MaxSteps:
      return "max_steps";
  }
  return "unknown";
}

double SwarmState::max_std() const {
  return posterior_std.empty() ? 0.0 : *std::max_element(posterior_std.begin(), posterior_std.end());
}

namespace {

double broadcast(const std::vector<double>& v, std::size_t k, const char* what) {
  if (v.size() == 1) return v.front();
  if (k < v.size()) return v[k];
  throw DimensionError(std::string(what) + " has the wrong number of coordinates");
}

void check_broadcast(const std::vector<double>& v, std::size_t dim, const char* what) {
  if (v.size() != 1 && v.size() != dim) {
    throw DimensionError(std::string(what) + " has " + std::to_string(v.size()) +
                         " coordinates, expected 1 or " + std::to_string(dim));
  }
}

}  // namespace

SwarmState init_swarm(const SwarmConfig& config, std::size_t dim, Rng& rng) {
  config.validate();
  if (dim < 1) throw DomainError("parameter dimension must be >= 1");
  SwarmState state;
  state.weights = {config.weight_a, config.weight_b};
  state.particles.assign(static_cast<std::size_t>(config.num_particles), std::vector<double>(dim));
  state.posterior_mean.assign(dim, 0.0);
  state.posterior_std.assign(dim, 0.0);

  if (const auto* u = std::get_if<UniformInit>(&config.init)) {
    check_broadcast(u->lower, dim, "uniform lower bound");
    check_broadcast(u->upper, dim, "uniform upper bound");
    for (std::size_t k = 0; k < dim; ++k) {
      const double lo = broadcast(u->lower, k, "lower");
      const double hi = broadcast(u->upper, k, "upper");
      if (lo > hi) throw DomainError("uniform init has lower > upper");
      state.posterior_mean[k] = 0.5 * (lo + hi);
      state.posterior_std[k] = (hi - lo) / std::sqrt(12.0);
    }
    for (auto& p : state.particles) {
      for (std::size_t k = 0; k < dim; ++k) {
        std::uniform_real_distribution<double> d(broadcast(u->lower, k, "lower"),
                                                 broadcast(u->upper, k, "upper"));
        p[k] = d(rng);
      }
    }
  } else {
    const auto& g = std::get<GaussianInit>(config.init);
    check_broadcast(g.mean, dim, "gaussian mean");
    check_broadcast(g.std, dim, "gaussian std");
    for (std::size_t k = 0; k < dim; ++k) {
      state.posterior_mean[k] = broadcast(g.mean, k, "mean");
      state.posterior_std[k] = broadcast(g.std, k, "std");
      if (state.posterior_std[k] < 0.0) throw DomainError("gaussian init std must be >= 0");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& p : state.particles) {
      for (std::size_t k = 0; k < dim; ++k) {
        p[k] = state.posterior_mean[k] + state.posterior_std[k] * normal(rng);
      }
    }
  }
  return state;
}

namespace {

std::vector<ParticleEval> evaluate_all(const SwarmState& state, const Objective& objective,
                                       const SwarmConfig& config, int step) {
  const std::size_t n = state.particles.size();
  std::vector<ParticleEval> evals(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        Rng rng = make_rng(config.seed, static_cast<std::uint64_t>(step), i);
        evals[i] = objective(state.particles[i], state.weights, rng);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(config.eval_threads), n);
  if (threads <= 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back(work, b, std::min(n, b + chunk));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw ObjectiveError(i, e.what());
    }
  }
  return evals;
}

double nan_mean(const std::vector<ParticleEval>& evals, const std::vector<std::size_t>& idx,
                double ParticleEval::*field) {
  double sum = 0.0;
  std::size_t count = 0;
  for (auto i : idx) {
    const double v = evals[i].*field;
    if (std::isfinite(v)) {
      sum += v;
      ++count;
    }
  }
  return count == 0 ? std::nan("") : sum / static_cast<double>(count);
}

}  // namespace

SwarmState swarm_step(const SwarmState& state, const Objective& objective,
                      const SwarmConfig& config, Rng& rng) {
  if (state.converged) throw DomainError("swarm has already converged");
  const std::size_t n = state.particles.size();
  const std::size_t dim = state.dimension();
  const auto s = static_cast<std::size_t>(config.survivor_count());
  if (n != static_cast<std::size_t>(config.num_particles) || s > n) {
    throw DimensionError("swarm state does not match its configuration");
  }

  SwarmState out;
  out.step = state.step + 1;
  out.weights = state.weights;
  out.evaluations = evaluate_all(state, objective, config, out.step);
  const auto& evals = out.evaluations;

  double mean_all = 0.0;
  for (const auto& e : evals) mean_all += e.value;
  mean_all /= static_cast<double>(n);
  const bool plateau = std::isfinite(state.last_mean_fobj) &&
                       std::abs(mean_all - state.last_mean_fobj) < config.plateau_threshold;
  out.last_mean_fobj = mean_all;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return evals[x].value < evals[y].value; });
  const std::vector<std::size_t> survivors(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
  out.best_fobj = evals[survivors.front()].value;

  if (config.adaptive) {
    const double dp = std::abs(nan_mean(evals, survivors, &ParticleEval::purity) -
                               nan_mean(evals, order, &ParticleEval::purity));
    const double de = std::abs(nan_mean(evals, survivors, &ParticleEval::energy) -
                               nan_mean(evals, order, &ParticleEval::energy));
    if (std::isfinite(dp) && std::isfinite(de) && dp + de > 0.0) {
      const double a = std::clamp(dp / (dp + de), 0.05, 0.95);
      out.weights = {a, 1.0 - a};
    }
  }

  // Better survivors weigh more: w_i = (max F - F_i) + 1e-12.
  const double worst = evals[survivors.back()].value;
  std::vector<double> w(s);
  double survivor_sum = 0.0;
  for (std::size_t k = 0; k < s; ++k) {
    survivor_sum += evals[survivors[k]].value;
    w[k] = (worst - evals[survivors[k]].value) + 1e-12;
  }
  out.survivor_mean_fobj = survivor_sum / static_cast<double>(s);
  if (worst == evals[survivors.front()].value) std::fill(w.begin(), w.end(), 1.0);
  if (config.weighting == SurvivorWeighting::Uniform) std::fill(w.begin(), w.end(), 1.0);
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);

  out.posterior_mean.assign(dim, 0.0);
  out.posterior_std.assign(dim, 0.0);
  for (std::size_t k = 0; k < s; ++k) {
    const auto& theta = state.particles[survivors[k]];
    for (std::size_t c = 0; c < dim; ++c) out.posterior_mean[c] += w[k] * theta[c] / wsum;
  }
  for (std::size_t c = 0; c < dim; ++c) {
    double var = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
      const double d = state.particles[survivors[k]][c] - out.posterior_mean[c];
      var += w[k] * d * d / wsum;
    }
    out.posterior_std[c] = std::sqrt(var);
  }
  const bool dispersed = out.max_std() < config.dispersion_threshold;
  if (config.greedy) out.posterior_mean = state.particles[survivors.front()];

  out.particles.reserve(n);
  for (auto i : survivors) out.particles.push_back(state.particles[i]);
  std::normal_distribution<double> normal(0.0, 1.0);
  while (out.particles.size() < n) {
    std::vector<double> theta(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      theta[c] = out.posterior_mean[c] + out.posterior_std[c] * normal(rng);
    }
    out.particles.push_back(std::move(theta));
  }

  if (dispersed) {
    out.converged = ConvergenceReason::Dispersion;
  } else if (plateau) {
    out.converged = ConvergenceReason::Plateau;
  } else if (out.step >= config.max_steps) {
    out.converged = ConvergenceReason::MaxSteps;
  }
  return out;
}

std::optional<std::size_t> SearchResult::collapsed_subspace() const {
  if (subspace_fidelity_trace.empty()) return std::nullopt;
  const auto& last = subspace_fidelity_trace.back();
  return static_cast<std::size_t>(std::max_element(last.begin(), last.end()) - last.begin());
}

std::vector<StepRecord> SearchResult::records() const {
  std::vector<StepRecord> out;
  for (int k = 0; k < steps; ++k) {
    const auto i = static_cast<std::size_t>(k);
    StepRecord r{k + 1, fobj_trace[i], best_fobj_trace[i], std_trace[i], std::nullopt};
    if (i < fidelity_trace.size()) r.fidelity = fidelity_trace[i];
    out.push_back(r);
  }
  return out;
}

SearchResult run_swarm(const Objective& objective, std::size_t dim, const SwarmConfig& config,
                       const std::function<StateVector(std::span<const double>)>& state_of,
                       const SpectrumOracle* oracle, std::optional<std::size_t> target_subspace) {
  config.validate();
  Rng rng = make_rng(config.seed, 0xfeedULL);
  SwarmState state = init_swarm(config, dim, rng);
  SearchResult result;
  result.num_particles = config.num_particles;
  const bool track = oracle != nullptr && static_cast<bool>(state_of);
  while (!state.converged) {
    state = swarm_step(state, objective, config, rng);
    result.fobj_trace.push_back(state.last_mean_fobj);
    result.best_fobj_trace.push_back(state.best_fobj);
    result.std_trace.push_back(state.max_std());
    result.objective_evaluations += state.evaluations.size();
    for (const auto& e : state.evaluations) {
      if (std::isfinite(e.purity)) ++result.purity_evaluations;
      if (std::isfinite(e.energy)) ++result.energy_evaluations;
    }
    if (track) {
      result.subspace_fidelity_trace.push_back(
          oracle->subspace_fidelities(state_of(state.posterior_mean)));
    }
  }
  result.steps = state.step;
  result.convergence_reason = *state.converged;
  result.theta_best = state.posterior_mean;
  result.theta_uncertainty = state.posterior_std;
  result.final_weights = state.weights;
  if (track) {
    result.target_subspace = target_subspace ? target_subspace : result.collapsed_subspace();
    if (*result.target_subspace >= oracle->num_subspaces()) {
      throw DomainError("target subspace index out of range");
    }
    for (const auto& f : result.subspace_fidelity_trace) {
      result.fidelity_trace.push_back(f[*result.target_subspace]);
    }
  }
  return result;
}

ObjectiveValue noisy_objective(const StateVector& state, const HermitianEigensystem& hamiltonian,
                               double t, ObjectiveWeights weights, const NoiseModel& noise,
                               Rng& rng, bool need_energy) {
  if (noise.evolution_phase_sigma <= 0.0) {
    return objective(state, hamiltonian, t, weights, noise.tomography, &rng, need_energy);
  }
  ControlQubitState rho = control_density(state, hamiltonian, t);
  std::normal_distribution<double> normal(0.0, noise.evolution_phase_sigma);
  rho.rho(1, 0) *= std::polar(1.0, normal(rng));
  rho.rho(0, 1) = std::conj(rho.rho(1, 0));
  if (noise.tomography) rho = tomography_sample(rho, noise.tomography->shots_per_basis, rng);
  ObjectiveValue out;
  out.purity = purity(rho);
  out.energy = std::nan("");
  if (weights.b > 0.0) {
    out.energy = energy_estimator(rho, t);
  } else if (need_energy) {
    try {
      out.energy = energy_estimator(rho, t);
    } catch (const PhaseUndefinedError&) {
    }
  }
  out.value = -weights.a * out.purity + (weights.b > 0.0 ? weights.b * out.energy : 0.0);
  return out;
}

namespace {

Objective waves_objective(const HermitianEigensystem& hamiltonian, const Ansatz& ansatz,
                          const ComplexMatrix* excitation, double t, const NoiseModel& noise,
                          bool need_energy) {
  return [&hamiltonian, &ansatz, excitation, t, &noise, need_energy](
             std::span<const double> theta, const ObjectiveWeights& w, Rng& rng) {
    StateVector trial = prepare(ansatz, theta, noise.parameters, &rng);
    if (excitation != nullptr) trial = apply_unitary(trial, *excitation);
    const ObjectiveValue v = noisy_objective(trial, hamiltonian, t, w, noise, rng, need_energy);
    ParticleEval e;
    e.value = v.value;
    e.energy = v.energy;
    // Energy-only searches never read the purity.
    e.purity = w.a > 0.0 ? v.purity : std::nan("");
    return e;
  };
}

}  // namespace

SearchResult run_ground_search(const HermitianEigensystem& hamiltonian, const Ansatz& ansatz,
                               double t, const SwarmConfig& config, const NoiseModel& noise,
                               const SpectrumOracle* oracle) {
  if (hamiltonian.dimension() != ansatz.reference().dimension()) {
    throw DimensionError("Hamiltonian and ansatz registers differ");
  }
  const Objective f = waves_objective(hamiltonian, ansatz, nullptr, t, noise, config.adaptive);
  auto state_of = [&ansatz](std::span<const double> theta) { return ansatz.prepare(theta); };
  return run_swarm(f, ansatz.num_parameters(), config, state_of, oracle, std::size_t{0});
}

GaussianInit excited_init(std::span<const double> theta_g, const SwarmInit& configured) {
  GaussianInit init;
  init.mean.assign(theta_g.begin(), theta_g.end());
  if (const auto* g = std::get_if<GaussianInit>(&configured)) {
    init.std = g->std;
  } else {
    double widest = 0.0;
    for (double x : theta_g) widest = std::max(widest, std::abs(x));
    init.std = {widest};
  }
  return init;
}

SearchResult run_excited_search(const HermitianEigensystem& hamiltonian, const Ansatz& ansatz,
                                std::span<const double> theta_g, const ExcitationOp& excitation,
                                double t, const SwarmConfig& config, const NoiseModel& noise,
                                const SpectrumOracle* oracle,
                                std::optional<std::size_t> target_subspace) {
  if (theta_g.size() != ansatz.num_parameters()) {
    throw DimensionError("theta_g length does not match the ansatz");
  }
  if (hamiltonian.dimension() != ansatz.reference().dimension()) {
    throw DimensionError("Hamiltonian and ansatz registers differ");
  }
  SwarmConfig cfg = config;
  cfg.weight_a = 1.0;
  cfg.weight_b = 0.0;
  cfg.adaptive = false;
  cfg.init = excited_init(theta_g, config.init);
  const ComplexMatrix exc = excitation.unitary();
  const Objective f = waves_objective(hamiltonian, ansatz, &exc, t, noise, false);
  auto state_of = [&ansatz, &exc](std::span<const double> theta) {
    return apply_unitary(ansatz.prepare(theta), exc);
  };
  return run_swarm(f, ansatz.num_parameters(), cfg, state_of, oracle, target_subspace);
}

}  // namespace waves
