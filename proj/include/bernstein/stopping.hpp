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
#include <vector>

#include <nlohmann/json.hpp>

#include "bernstein/core.hpp"
#include "bernstein/simulate.hpp"

namespace bernstein::stopping {

/// Survival-type probabilities of the optimal stopping times:
///   forward   q(t, x)  = P(tau  > T~)   for t <= T~,
///   backward  q*(t, x) = P(tau* < T~)   for t >= T~.
struct SurvivalProblem {
  Orientation orientation = Orientation::kForward;
  double threshold = 0.0;  // T~
  /// Optimal drift b (forward) or b* (backward) of the simulated process.
  const ScalarField* drift = nullptr;
  const RegionMask* mask = nullptr;
  double hbar = 1.0;
};

enum class Lemma3Class : std::uint8_t { kZero = 0, kOne = 1, kPde = 2 };

const char* to_string(Lemma3Class c);

/// Per-column extreme continuation times: forward uses the supremum t_bar,
/// backward the infimum t_under. A column that is CONTINUATION on the last
/// interior row before the boundary row takes the horizon end (T/2 forward,
/// -T/2 backward); a column with no CONTINUATION node takes the opposite end.
std::vector<double> continuation_extent(const RegionMask& mask, Orientation o);

/// Closed-form cases of the survival function at node (n, i):
///   forward:  ONE  if (S and t > T~) or (C and t >= T~);
///             ZERO if (S and t <= T~) or (C and T~ >= t_bar(x));
///   backward: ONE  if (S* and t < T~) or (C* and t <= T~);
///             ZERO if (S* and t >= T~) or (C* and T~ <= t_under(x));
///   PDE otherwise.
Lemma3Class classify_lemma3(std::size_t n, std::size_t i, double threshold, const RegionMask& mask,
                            Orientation o, const std::vector<double>& extent);
Lemma3Class classify_lemma3(std::size_t n, std::size_t i, double threshold, const RegionMask& mask,
                            Orientation o);

struct SolveOptions {
  /// Tolerated excursion outside [0, 1] before the maximum principle is
  /// declared violated.
  double max_principle_tol = 1e-9;
};

struct SurvivalSolution {
  ScalarField q;
  /// Lemma-3 class of every node.
  std::vector<Lemma3Class> classes;
  Orientation orientation;
  double threshold;
  /// Values at t = T~ (1 on CONTINUATION, 0 on STOPPING) used when T~ is
  /// not a grid row.
  std::vector<double> threshold_slice;
  double max_cell_peclet = 0.0;
  std::size_t upwind_nodes = 0;

  Lemma3Class cls(std::size_t n, std::size_t i) const { return classes[n * q.grid().nx() + i]; }

  /// q at an arbitrary (t, x): bilinear, with the T~ slice inserted as an
  /// extra time level. Beyond T~ (in the orientation's direction) the
  /// closed-form value 1 is returned for CONTINUATION positions. Positions
  /// outside the spatial truncation take the edge value.
  double evaluate(double t, double x) const;
};

/// Implicit march of d_tau q = c d_x q + (hbar/2) d_xx q from T~ towards the
/// far end of the horizon, c = b (forward) or -b* (backward). Central
/// differences where the cell Peclet number |c| dx / (hbar/2) <= 2, upwind
/// elsewhere; STOPPING nodes carry q = 0, domain edges are zero-flux.
SurvivalSolution solve_q(const SurvivalProblem& problem, const SolveOptions& opts = {});

struct Estimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// Fraction of paths with tau > T~ (forward) or tau* < T~ (backward).
Estimate empirical_survival(const simulate::PathEnsemble& ensemble, double threshold);

struct MartingaleCheckpoint {
  double t = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double difference = 0.0;  // |mean - q(t0, x0)|
  bool within = false;      // difference <= sigmas * stderr (or exact)
};

struct MartingaleReport {
  double q0 = 0.0;
  std::vector<MartingaleCheckpoint> checkpoints;
  bool pass = false;
};

/// Sample mean of q(t ^ tau, Z_{t ^ tau}) at each checkpoint of the ensemble
/// compared with q(t0, x0). Checkpoints must lie in [t0, T~].
MartingaleReport martingale_check(const SurvivalSolution& q, const simulate::PathEnsemble& ensemble,
                                  double sigmas = 3.0);

nlohmann::json to_json(const MartingaleReport& r);

}  // namespace bernstein::stopping
