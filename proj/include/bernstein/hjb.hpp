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
#include <vector>

#include <nlohmann/json.hpp>

#include "bernstein/core.hpp"

namespace bernstein::hjb {

/// Treatment of the two truncation edges x_min, x_max.
enum class FarField {
  /// d/dx log eta = d/dx log obstacle (ghost node). Keeps eta above the
  /// obstacle where the continuation region reaches the edge.
  kLogSlope,
  /// eta := obstacle, i.e. the far field is treated as stopped.
  kObstacle,
};

struct SolverConfig {
  double psor_tol = 1e-10;
  double psor_omega = 1.5;
  int psor_max_iter = 20000;
  double region_abs_tol = 1e-9;
  double region_rel_tol = 1e-8;
  FarField far_field = FarField::kLogSlope;
  /// Width added on each side of [x_min, x_max] for the computation; the
  /// solution is returned on the caller's grid. Negative selects
  /// 6 sqrt(hbar T), about six diffusion lengths over the horizon.
  double far_field_padding = -1.0;
};

/// Number of grid steps added on each side for the given spec and step.
std::size_t padding_nodes(const SolverConfig& cfg, const ProblemSpec& spec, double dx);

void validate(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SolverConfig& cfg);

struct SolveStats {
  std::size_t steps = 0;
  std::size_t total_sweeps = 0;
  std::size_t max_sweeps = 0;
  /// Largest end-of-step complementarity residual seen during the march.
  double max_step_residual = 0.0;
};

/// eta (or eta*) with its obstacle, regions and free boundary.
struct EtaSolution {
  ScalarField eta;
  ScalarField obstacle;
  RegionMask mask;
  /// Free-boundary positions per time row.
  std::vector<std::vector<double>> boundary;
  Orientation orientation;
  SolverConfig config;
  SolveStats stats;
  /// Fields on the padded computational grid (equal to eta/obstacle when no
  /// padding is used) and the offset of the caller's first node in it.
  ScalarField computational_eta;
  ScalarField computational_obstacle;
  std::size_t pad_nodes = 0;
};

/// exp(-S/hbar) (forward) or exp(-S*/hbar) (backward) sampled on the grid.
ScalarField obstacle_field(const ProblemSpec& spec, const GridPtr& grid, Orientation o);

/// min{-hbar d_t eta - (hbar^2/2) eta_xx + V eta, eta - exp(-S/hbar)} = 0 with
/// eta(T/2) = exp(-S/hbar), marched from T/2 down to -T/2. Each implicit
/// Euler step is a tridiagonal LCP solved by projected SOR.
EtaSolution solve_forward_obstacle(const ProblemSpec& spec, const GridPtr& grid, const SolverConfig& cfg = {});

/// min{hbar d_t eta* - (hbar^2/2) eta*_xx + V eta*, eta* - exp(-S*/hbar)} = 0
/// with eta*(-T/2) = exp(-S*/hbar), marched upward.
EtaSolution solve_backward_obstacle(const ProblemSpec& spec, const GridPtr& grid, const SolverConfig& cfg = {});

EtaSolution solve_obstacle(const ProblemSpec& spec, const GridPtr& grid, Orientation o,
                           const SolverConfig& cfg = {});

struct ValueSolution {
  ScalarField value;  // U or U*
  ScalarField drift;  // b = hbar d/dx log eta, or b* = -hbar d/dx log eta*
  RegionMask mask;
  Orientation orientation;
};

/// U = -hbar log eta. On STOPPING nodes the drift is taken from the
/// obstacle: -dS/dx (forward) or +dS*/dx (backward).
ValueSolution value_from_eta(const EtaSolution& sol, double hbar);

/// Nodewise min(row residual / diagonal, eta - obstacle) of the discrete
/// problem; the boundary row holds eta - obstacle.
ScalarField lcp_residual(const EtaSolution& sol, const ProblemSpec& spec);

/// max |residual| / max(1, max |eta|) over the whole computational grid.
double lcp_residual_norm(const EtaSolution& sol, const ProblemSpec& spec);

/// Fixed-horizon problem without stopping: the same implicit steps with the
/// projection removed. Mask is all CONTINUATION.
ValueSolution classical_value(const ProblemSpec& spec, const GridPtr& grid, Orientation o,
                              const SolverConfig& cfg = {});

/// The eta field of classical_value.
ScalarField classical_eta(const ProblemSpec& spec, const GridPtr& grid, Orientation o,
                          const SolverConfig& cfg = {});

}  // namespace bernstein::hjb
