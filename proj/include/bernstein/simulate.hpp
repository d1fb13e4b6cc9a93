// Copyright 2026 The Bernstein Authors
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

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bernstein/core.hpp"

namespace bernstein::simulate {

struct SimConfig {
  double dt = 1e-3;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  double t0 = -0.5;
  double x0 = 1.0;
  Orientation orientation = Orientation::kForward;
  /// Simulation end time; NaN means the far end of the horizon (T/2 forward,
  /// -T/2 backward).
  double t_final = std::numeric_limits<double>::quiet_NaN();
  /// Between steps, also stop with the Brownian-bridge crossing probability
  /// exp(-2 d0 d1 / (hbar dt)) of the nearest barrier edge. Removes the
  /// O(sqrt(dt)) bias of discrete monitoring.
  bool bridge_correction = true;
  /// Times at which Z_{t ^ tau} is recorded.
  std::vector<double> checkpoints;
};

void validate(const SimConfig& cfg);
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& cfg);

struct Statistic {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

Statistic summarize(const std::vector<double>& samples);
nlohmann::json to_json(const Statistic& s);

enum class Exit : std::uint8_t {
  kHorizon = 0,   // reached t_final without entering the stopping set
  kBoundary = 1,  // stopped on the stopping set
  kStart = 2,     // started inside the stopping set (tau = t0)
};

/// Per-path outcome. Times are in the original (unflipped) time.
struct PathRecord {
  double stop_time = 0.0;
  double stopped_state = 0.0;
  double running_cost = 0.0;   // int (|b|^2/2 + V) ds
  double terminal_cost = 0.0;  // S or S* at the stopped state
  Exit exit = Exit::kHorizon;

  double action() const { return running_cost + terminal_cost; }
  bool hit() const { return exit != Exit::kHorizon; }
};

struct PathEnsemble {
  SimConfig config;
  std::vector<PathRecord> paths;
  /// checkpoint_states[k][p] = Z at min(checkpoint k, tau) for path p (in
  /// the sense of the orientation's time direction).
  std::vector<std::vector<double>> checkpoint_states;
  /// checkpoint_stopped[k][p] is set when path p stopped before checkpoint k.
  std::vector<std::vector<std::uint8_t>> checkpoint_stopped;
  std::size_t steps = 0;
  double dt = 0.0;  // effective step (divides the interval exactly)
  /// Paths that left the grid hull; their drift lookups were clamped to the edge.
  std::size_t left_hull = 0;
  bool start_in_stopping = false;

  Statistic stop_time() const;
  Statistic stopped_state() const;
  Statistic action() const;
  Statistic hit_fraction() const;
  nlohmann::json summary() const;
};

/// Euler-Maruyama Z <- Z + b(t, Z) dt + sqrt(hbar dt) N(0, 1), stopped at the
/// first entry into STOPPING nodes of the mask (excluding the terminal row)
/// or at t_final. Paths are independent and keyed by (seed, path index).
PathEnsemble simulate_forward(const ProblemSpec& spec, const ScalarField& drift, const RegionMask& mask,
                              const SimConfig& cfg);

/// Backward dynamics d*Z = b*(t, Z) d*t + sqrt(hbar) d*W* from t0 downward,
/// realized as the forward SDE with drift -b*(-r, x) in r = -t. The stop
/// time is the last exit from the STOPPING set before t0.
PathEnsemble simulate_backward(const ProblemSpec& spec, const ScalarField& drift_star, const RegionMask& mask_star,
                               const SimConfig& cfg);

PathEnsemble simulate(const ProblemSpec& spec, const ScalarField& drift, const RegionMask& mask,
                      const SimConfig& cfg);

/// Mean and stderr of the sampled action J (or J*).
Statistic action_estimate(const PathEnsemble& ensemble);

struct ReversedDrift {
  ScalarField drift_star;
  /// Nodes whose gradient stencil touches rho <= floor; their value is B unchanged.
  RegionMask undefined;
  std::size_t undefined_count = 0;
};

/// B* = B - hbar d/dx log rho. Nodes whose stencil has rho <= floor_rel * max(rho) are flagged.
ReversedDrift reversed_drift(const ScalarField& drift, const ScalarField& rho, double hbar, double floor_rel = 1e-12);

struct FokkerPlanckOptions {
  /// Nodes flagged STOPPING absorb mass (density held at 0 there).
  const RegionMask* absorbing = nullptr;
  /// Exclude the terminal row from absorption (it is STOPPING by convention).
  bool skip_last_row = true;
};

struct FokkerPlanckResult {
  ScalarField rho;
  std::vector<double> mass;  // trapezoid mass per time row
  double min_value = 0.0;
  double max_cell_peclet = 0.0;
  std::vector<std::string> warnings;
};

/// d_t rho = -d_x(b rho) + (hbar/2) d_xx rho from row 0 upward. Finite
/// volumes on the node-centred cells (half cells at the edges), upwind
/// advection, implicit Euler, zero flux at the edges: the trapezoid mass is
/// conserved to round-off without absorption.
FokkerPlanckResult fokker_planck(const ProblemSpec& spec, const ScalarField& drift, std::span<const double> rho0,
                                 const FokkerPlanckOptions& opts = {});

struct BridgeTestConfig {
  double s = 0.0, x = 0.0, u = 1.0, z = 0.0, t = 0.5;
  double hbar = 1.0;
  std::size_t n_paths = 100000;
  std::size_t n_bins = 30;
  std::uint64_t seed = 1;
  double alpha = 0.01;
  /// Bins cover mean +- span_sd standard deviations; the outer bins extend
  /// to infinity.
  double span_sd = 4.0;
};

struct BridgeTestReport {
  double mean = 0.0, mean_stderr = 0.0;
  double variance = 0.0, variance_stderr = 0.0;
  double skewness = 0.0, skewness_stderr = 0.0;
  double expected_mean = 0.0, expected_variance = 0.0;
  double chi_square = 0.0;
  std::size_t dof = 0;
  double p_value = 0.0;
  bool pass = false;
  std::vector<double> edges;  // interior bin edges
  std::vector<std::size_t> observed;
  std::vector<double> expected;
};

/// Pins Brownian paths at (s, x) and (u, z) by the exact Gaussian bridge
/// construction, histograms Z_t and compares with the law h h / h by a
/// chi-square test. Throws if a bin is empty or its expected count is < 5.
BridgeTestReport bridge_markov_test(const BridgeTestConfig& cfg);
nlohmann::json to_json(const BridgeTestReport& r);

}  // namespace bernstein::simulate
