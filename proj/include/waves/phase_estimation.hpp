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

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "waves/statevector.hpp"

namespace waves {

// Phase convention: U = exp(-iHt) has eigenphases exp(2 pi i phi_j) with
// phi_j = frac(-lambda_j t / 2 pi). Eigenvalues read back from a phase are
// reported in (-pi/t, pi/t], matching energy_estimator.

/// frac(-lambda t / 2 pi) evaluated in quad precision.
double phase_fraction(double lambda, double t);

/// The eigenvalue representative in (-pi/t, pi/t] for a phase fraction.
double eigenvalue_from_phase(double fraction, double t);

/// Bits of the m-bit binary fraction nearest to phase_fraction(lambda, t),
/// most significant first, with 1.0 wrapping to 0. This is what IPEA reads
/// out on an exact eigenstate.
std::vector<int> rounded_phase_bits(double lambda, double t, int m_bits);

/// exp(-i lambda_j t 2^k) for every eigenvalue, reduced mod 2 pi in quad
/// precision so large k carries no accumulated error.
std::vector<Complex> controlled_power_phase(const HermitianEigensystem& eigensystem, double t,
                                            int k);

struct IpeaOptions {
  int m_bits = 32;
  int shots_per_bit = 1;
  /// Record per-bit counts without collapsing the target; each shot starts
  /// from the input state.
  bool statistics_mode = false;
};

struct IpeaResult {
  std::vector<int> bits;  // most significant first
  double phase_fraction = 0.0;
  double eigenvalue_estimate = 0.0;
  std::vector<std::pair<int, int>> per_bit_counts;  // (zeros, ones), most significant first
  /// Target register after the run (the input state in statistics mode).
  StateVector final_state;
};

/// Iterative phase estimation of U = exp(-iHt) on the given target state.
/// Bits are extracted least significant first with feedback rotations; the
/// recorded bit of each round is the majority over shots_per_bit samples and
/// the joint state is collapsed onto it before the next round.
IpeaResult ipea(const StateVector& state, const HermitianEigensystem& eigensystem, double t,
                const IpeaOptions& options, Rng& rng);

/// One no-collapse Bayesian phase-estimation experiment. overlap_weight is
/// the squared overlap |alpha|^2 of the target eigenstate.
struct RfpeExperiment {
  double time = 1.0;
  double phase = 0.0;
  double overlap_weight = 1.0;
};

/// P(datum | lambda): P(0) = w cos^2((lambda - phi) t / 2) + (1 - w) / 2.
double rfpe_likelihood(const RfpeExperiment& experiment, double lambda, int datum);

/// Gaussian belief discretized on num_points hypotheses spanning
/// mean +- window * std.
class RfpePrior {
 public:
  RfpePrior(double mean, double std, int num_points = 512, double window = 5.0);

  double mean() const noexcept { return mean_; }
  double std() const noexcept { return std_; }
  int num_points() const noexcept { return static_cast<int>(grid_.size()); }
  double window() const noexcept { return window_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  double mean_;
  double std_;
  double window_;
  std::vector<double> grid_;
  std::vector<double> weights_;
};

/// Signals that the data excluded every hypothesis on the grid.
class RfpeDegenerateError : public Error {
 public:
  using Error::Error;
};

/// Bayes update on the grid followed by a Gaussian refit over a recentered
/// window.
RfpePrior rfpe_update(const RfpePrior& prior, const RfpeExperiment& experiment, int datum);

/// Several data folded into one update on the same grid.
RfpePrior rfpe_update_batch(const RfpePrior& prior, std::span<const RfpeExperiment> experiments,
                            std::span<const int> data);

struct RfpeOptions {
  double overlap_weight = 0.5;
  int epochs = 200;
  double max_time = 1e5;
  /// Evolution time t = time_factor / sigma.
  double time_factor = 1.25;
  /// Draw the inversion phase from the current Gaussian belief. With
  /// phi fixed at the mean the likelihood is symmetric about the mean and
  /// the refit mean never moves.
  bool sample_phase = true;
};

struct RfpeEpochRecord {
  int epoch = 0;
  double time = 0.0;
  double phase = 0.0;
  double posterior_mean = 0.0;
  double posterior_std = 0.0;
  double error = 0.0;
};

struct RfpeTrace {
  double initial_error = 0.0;
  std::vector<RfpeEpochRecord> epochs;
  int reinitializations = 0;

  double final_error() const { return epochs.empty() ? initial_error : epochs.back().error; }
};

/// Runs the adaptive experiment loop (t = time_factor/sigma capped at max_time,
/// phi ~ N(mean, sigma) or phi = mean) against data drawn from the true mixture
/// sum_j p_j cos^2((lambda_j - phi) t / 2). Error is the distance from the
/// posterior mean to the nearest true eigenvalue.
RfpeTrace rfpe_run(std::span<const double> true_eigenvalues, std::span<const double> populations,
                   const RfpePrior& prior0, const RfpeOptions& options, Rng& rng);

}  // namespace waves
