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

#include "waves/phase_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace waves {

namespace {

// GCC quad precision keeps ~34 significant digits, enough to reduce
// 2^63 * lambda * t / 2 pi without visible error.
using Quad = __float128;

constexpr Quad kTwoPiQ = 6.283185307179586476925286766559005768394Q;

Quad frac_q(Quad x) {
  const bool negative = x < 0;
  if (negative) x = -x;
  Quad whole = 0;
  // Strip the integer part one power of two at a time (exact in binary).
  Quad p = 1;
  while (p * 2 <= x) p *= 2;
  for (; p >= 1; p /= 2) {
    if (x - whole >= p) whole += p;
  }
  Quad f = x - whole;
  if (negative && f != 0) f = 1 - f;
  return f;
}

Quad phase_fraction_q(double lambda, double t) {
  return frac_q(-static_cast<Quad>(lambda) * static_cast<Quad>(t) / kTwoPiQ);
}

// frac(2^k * f) for f in [0, 1).
Quad shifted_fraction(Quad f, int k) {
  for (int i = 0; i < k; ++i) {
    f *= 2;
    if (f >= 1) f -= 1;
  }
  return f;
}

}  // namespace

double phase_fraction(double lambda, double t) {
  return static_cast<double>(phase_fraction_q(lambda, t));
}

double eigenvalue_from_phase(double fraction, double t) {
  if (!(t > 0.0)) throw DomainError("evolution time must be positive");
  double g = fraction - std::floor(fraction);
  if (g >= 0.5) g -= 1.0;
  return -2.0 * std::numbers::pi * g / t;
}

std::vector<int> rounded_phase_bits(double lambda, double t, int m_bits) {
  if (m_bits < 1 || m_bits > 64) throw DomainError("bit count must lie in [1, 64]");
  Quad f = phase_fraction_q(lambda, t);
  // Round to the nearest multiple of 2^-m.
  Quad scale = 1;
  for (int i = 0; i < m_bits; ++i) scale *= 2;
  Quad scaled = f * scale + Quad(0.5);
  Quad rounded = scaled - frac_q(scaled);
  if (rounded >= scale) rounded -= scale;
  std::vector<int> bits(static_cast<std::size_t>(m_bits));
  for (int i = m_bits - 1; i >= 0; --i) {
    const Quad half = rounded / 2;
    const Quad floor_half = half - frac_q(half);
    bits[static_cast<std::size_t>(i)] = (rounded - 2 * floor_half) != 0 ? 1 : 0;
    rounded = floor_half;
  }
  return bits;
}

std::vector<Complex> controlled_power_phase(const HermitianEigensystem& eigensystem, double t,
                                            int k) {
  if (k < 0) throw DomainError("power exponent must be >= 0");
  std::vector<Complex> out;
  out.reserve(eigensystem.dimension());
  for (Eigen::Index j = 0; j < eigensystem.eigenvalues.size(); ++j) {
    const Quad f = shifted_fraction(phase_fraction_q(eigensystem.eigenvalues[j], t), k);
    out.push_back(std::polar(1.0, static_cast<double>(kTwoPiQ * f)));
  }
  return out;
}

IpeaResult ipea(const StateVector& state, const HermitianEigensystem& eigensystem, double t,
                const IpeaOptions& options, Rng& rng) {
  if (options.m_bits < 1 || options.m_bits > 64) throw DomainError("bit count must lie in [1, 64]");
  if (options.shots_per_bit < 1) throw DomainError("shots_per_bit must be >= 1");
  const int m = options.m_bits;
  ComplexVector alpha = eigenbasis_amplitudes(state, eigensystem);
  const auto dim = alpha.size();

  std::vector<Quad> phases(static_cast<std::size_t>(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    phases[static_cast<std::size_t>(j)] = phase_fraction_q(eigensystem.eigenvalues[j], t);
  }

  IpeaResult result;
  result.bits.assign(static_cast<std::size_t>(m), 0);
  result.per_bit_counts.assign(static_cast<std::size_t>(m), {0, 0});
  // Binary fraction 0.0 b_{k+1} ... b_m of the bits measured so far; round k
  // subtracts it from frac(2^{k-1} phi) so that only b_k remains.
  Quad feedback = 0;
  std::vector<double> angle(static_cast<std::size_t>(dim));
  for (int k = m; k >= 1; --k) {
    double p_one = 0.0;
    const double norm = alpha.squaredNorm();
    for (Eigen::Index j = 0; j < dim; ++j) {
      // Control phase after controlled-U^{2^{k-1}} and the feedback rotation.
      const Quad f = frac_q(shifted_fraction(phases[static_cast<std::size_t>(j)], k - 1) - feedback);
      const double theta = static_cast<double>(kTwoPiQ * f);
      angle[static_cast<std::size_t>(j)] = theta;
      const double s = std::sin(0.5 * theta);
      p_one += std::norm(alpha[j]) * s * s / norm;
    }
    p_one = std::clamp(p_one, 0.0, 1.0);

    std::bernoulli_distribution shot(p_one);
    int ones = 0;
    for (int s = 0; s < options.shots_per_bit; ++s) ones += shot(rng) ? 1 : 0;
    const int zeros = options.shots_per_bit - ones;
    int bit = ones > zeros ? 1 : 0;
    if (ones == zeros) bit = std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
    const auto idx = static_cast<std::size_t>(k - 1);
    result.bits[idx] = bit;
    result.per_bit_counts[idx] = {zeros, ones};

    if (!options.statistics_mode) {
      // Project onto the recorded control outcome: (1 +- e^{i theta}) / 2.
      const double sign = bit == 0 ? 1.0 : -1.0;
      for (Eigen::Index j = 0; j < dim; ++j) {
        alpha[j] *= 0.5 * (1.0 + sign * std::polar(1.0, angle[static_cast<std::size_t>(j)]));
      }
      const double n = alpha.norm();
      if (!(n > 0.0)) throw Error("IPEA collapsed onto a zero-probability branch");
      alpha /= n;
    }
    feedback = (feedback + Quad(bit) / 2) / 2;
  }

  Quad fraction = 0;
  Quad weight = Quad(0.5);
  for (int b : result.bits) {
    if (b) fraction += weight;
    weight /= 2;
  }
  result.phase_fraction = static_cast<double>(fraction);
  result.eigenvalue_estimate = eigenvalue_from_phase(result.phase_fraction, t);
  result.final_state = options.statistics_mode
                           ? state
                           : StateVector(state.num_qubits(), eigensystem.eigenvectors * alpha, true);
  return result;
}

double rfpe_likelihood(const RfpeExperiment& experiment, double lambda, int datum) {
  const double w = experiment.overlap_weight;
  if (!(w > 0.0 && w <= 1.0)) throw DomainError("overlap weight must lie in (0, 1]");
  if (datum != 0 && datum != 1) throw DomainError("datum must be 0 or 1");
  const double c = std::cos(0.5 * (lambda - experiment.phase) * experiment.time);
  const double p0 = w * c * c + 0.5 * (1.0 - w);
  return datum == 0 ? p0 : 1.0 - p0;
}

RfpePrior::RfpePrior(double mean, double std, int num_points, double window)
    : mean_(mean), std_(std), window_(window) {
  if (!(std > 0.0) || !std::isfinite(std)) throw DomainError("prior std must be positive");
  if (num_points < 2) throw DomainError("prior needs at least two grid points");
  if (!(window > 0.0)) throw DomainError("prior window must be positive");
  grid_.resize(static_cast<std::size_t>(num_points));
  weights_.resize(grid_.size());
  const double lo = mean - window * std;
  const double step = 2.0 * window * std / (num_points - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    grid_[i] = lo + step * static_cast<double>(i);
    const double z = (grid_[i] - mean) / std;
    weights_[i] = std::exp(-0.5 * z * z);
    total += weights_[i];
  }
  for (auto& w : weights_) w /= total;
}

namespace {

RfpePrior refit(const RfpePrior& prior, const std::vector<double>& posterior) {
  double total = 0.0;
  for (double w : posterior) total += w;
  if (!(total > 1e-300)) {
    throw RfpeDegenerateError("every phase hypothesis was excluded by the data");
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) mean += posterior[i] * prior.grid()[i];
  mean /= total;
  double var = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    const double d = prior.grid()[i] - mean;
    var += posterior[i] * d * d;
  }
  var /= total;
  // The grid cuts the Gaussian at +-window std, which understates its spread
  // by a fixed factor; undo it so that an uninformative datum is a no-op.
  double prior_var = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    const double d = prior.grid()[i] - prior.mean();
    prior_var += prior.weights()[i] * d * d;
  }
  var *= prior.std() * prior.std() / prior_var;
  // A posterior narrower than the grid resolution is pinned at one spacing.
  const double spacing = prior.grid()[1] - prior.grid()[0];
  const double std = std::max(std::sqrt(var), 0.5 * spacing);
  return RfpePrior(mean, std, prior.num_points(), prior.window());
}

}  // namespace

RfpePrior rfpe_update(const RfpePrior& prior, const RfpeExperiment& experiment, int datum) {
  std::vector<double> posterior = prior.weights();
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    posterior[i] *= rfpe_likelihood(experiment, prior.grid()[i], datum);
  }
  return refit(prior, posterior);
}

RfpePrior rfpe_update_batch(const RfpePrior& prior, std::span<const RfpeExperiment> experiments,
                            std::span<const int> data) {
  if (experiments.size() != data.size()) throw DimensionError("experiment and datum counts differ");
  std::vector<double> posterior = prior.weights();
  for (std::size_t e = 0; e < experiments.size(); ++e) {
    for (std::size_t i = 0; i < posterior.size(); ++i) {
      posterior[i] *= rfpe_likelihood(experiments[e], prior.grid()[i], data[e]);
    }
  }
  return refit(prior, posterior);
}

RfpeTrace rfpe_run(std::span<const double> true_eigenvalues, std::span<const double> populations,
                   const RfpePrior& prior0, const RfpeOptions& options, Rng& rng) {
  if (true_eigenvalues.empty() || true_eigenvalues.size() != populations.size()) {
    throw DimensionError("eigenvalue and population lists must be non-empty and equal length");
  }
  double total = 0.0;
  for (double p : populations) {
    if (p < 0.0) throw DomainError("populations must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("populations must sum to 1");
  if (options.epochs < 0) throw DomainError("epoch count must be >= 0");
  if (!(options.time_factor > 0.0)) throw DomainError("time factor must be positive");

  auto error_of = [&](double mean) {
    double best = std::numeric_limits<double>::infinity();
    for (double l : true_eigenvalues) best = std::min(best, std::abs(mean - l));
    return best;
  };

  RfpeTrace trace;
  trace.initial_error = error_of(prior0.mean());
  RfpePrior prior = prior0;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    RfpeExperiment experiment;
    experiment.time = std::min(options.time_factor / prior.std(), options.max_time);
    experiment.phase = options.sample_phase
                           ? std::normal_distribution<double>(prior.mean(), prior.std())(rng)
                           : prior.mean();
    experiment.overlap_weight = options.overlap_weight;

    double p0 = 0.0;
    for (std::size_t j = 0; j < true_eigenvalues.size(); ++j) {
      const double c = std::cos(0.5 * (true_eigenvalues[j] - experiment.phase) * experiment.time);
      p0 += populations[j] * c * c;
    }
    const int datum = uniform(rng) < p0 ? 0 : 1;
    try {
      prior = rfpe_update(prior, experiment, datum);
    } catch (const RfpeDegenerateError&) {
      prior = RfpePrior(prior.mean(), 2.0 * prior.std(), prior.num_points(), prior.window());
      ++trace.reinitializations;
    }
    trace.epochs.push_back({epoch, experiment.time, experiment.phase, prior.mean(), prior.std(),
                            error_of(prior.mean())});
  }
  return trace;
}

}  // namespace waves
