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

#include "bernstein/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bernstein/errors.hpp"

namespace bernstein::hjb {
namespace {

// One implicit Euler step of d_tau eta = (hbar/2) eta_xx - (V/hbar) eta as a
// tridiagonal system a_i eta_{i-1} + b_i eta_i + c_i eta_{i+1} = rhs_i.
struct Stencil {
  std::vector<double> a, b, c;
  std::vector<double> reaction;  // 1 - dtau V_i / hbar
  bool dirichlet_edges = false;
};

double edge_log_slope(std::span<const double> g, double dx, bool left) {
  const std::size_t n = g.size();
  if (left) return (-3.0 * std::log(g[0]) + 4.0 * std::log(g[1]) - std::log(g[2])) / (2.0 * dx);
  return (3.0 * std::log(g[n - 1]) - 4.0 * std::log(g[n - 2]) + std::log(g[n - 3])) / (2.0 * dx);
}

Stencil make_stencil(const ProblemSpec& spec, const SpaceTimeGrid& grid, std::span<const double> boundary_row,
                     FarField ff) {
  const std::size_t nx = grid.nx();
  const double dtau = grid.dt(), dx = grid.dx();
  const double lam = spec.hbar * dtau / (2.0 * dx * dx);
  Stencil s;
  s.a.assign(nx, -lam);
  s.b.assign(nx, 1.0 + 2.0 * lam);
  s.c.assign(nx, -lam);
  s.reaction.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) s.reaction[i] = 1.0 - dtau * spec.potential(grid.x(i)) / spec.hbar;
  s.a[0] = 0.0;
  s.c[nx - 1] = 0.0;
  if (ff == FarField::kObstacle) {
    s.dirichlet_edges = true;
    s.b[0] = s.b[nx - 1] = 1.0;
    s.c[0] = s.a[nx - 1] = 0.0;
  } else {
    // Ghost nodes eta_{-1} = eta_1 - 2 dx k_L eta_0, eta_N = eta_{N-2} + 2 dx k_R eta_{N-1}.
    const double kl = edge_log_slope(boundary_row, dx, true);
    const double kr = edge_log_slope(boundary_row, dx, false);
    s.b[0] = 1.0 + 2.0 * lam + 2.0 * lam * dx * kl;
    s.c[0] = -2.0 * lam;
    s.b[nx - 1] = 1.0 + 2.0 * lam - 2.0 * lam * dx * kr;
    s.a[nx - 1] = -2.0 * lam;
    if (!(s.b[0] > 0.0) || !(s.b[nx - 1] > 0.0))
      throw NumericalError("far-field row lost its positive diagonal; refine dx or use the obstacle far field");
  }
  return s;
}

void fill_rhs(const Stencil& s, std::span<const double> prev, std::span<const double> g, std::vector<double>& rhs) {
  const std::size_t nx = prev.size();
  rhs.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) rhs[i] = prev[i] * s.reaction[i];
  if (s.dirichlet_edges) {
    rhs[0] = g[0];
    rhs[nx - 1] = g[nx - 1];
  }
}

double row_residual(const Stencil& s, std::span<const double> x, const std::vector<double>& rhs, std::size_t i) {
  double r = s.b[i] * x[i] - rhs[i];
  if (i > 0) r += s.a[i] * x[i - 1];
  if (i + 1 < x.size()) r += s.c[i] * x[i + 1];
  return r / s.b[i];
}

double step_residual(const Stencil& s, std::span<const double> x, std::span<const double> g,
                     const std::vector<double>& rhs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max(worst, std::abs(std::min(row_residual(s, x, rhs, i), x[i] - g[i])));
  return worst;
}

// Projected SOR in fixed ascending order; x holds the initial guess.
std::size_t psor(const Stencil& s, std::span<double> x, std::span<const double> g, const std::vector<double>& rhs,
                 const SolverConfig& cfg, double& residual) {
  const std::size_t nx = x.size();
  for (std::size_t i = 0; i < nx; ++i) x[i] = std::max(x[i], g[i]);
  for (int sweep = 1; sweep <= cfg.psor_max_iter; ++sweep) {
    for (std::size_t i = 0; i < nx; ++i) {
      double sigma = rhs[i];
      if (i > 0) sigma -= s.a[i] * x[i - 1];
      if (i + 1 < nx) sigma -= s.c[i] * x[i + 1];
      const double gs = sigma / s.b[i];
      x[i] = std::max(g[i], x[i] + cfg.psor_omega * (gs - x[i]));
    }
    residual = step_residual(s, x, g, rhs);
    if (residual <= cfg.psor_tol) return static_cast<std::size_t>(sweep);
  }
  throw ConvergenceError("PSOR did not reach tolerance " + std::to_string(cfg.psor_tol) + " within " +
                         std::to_string(cfg.psor_max_iter) + " sweeps (residual " + std::to_string(residual) + ")");
}

std::size_t boundary_row(const SpaceTimeGrid& g, Orientation o) {
  return o == Orientation::kForward ? g.nt() - 1 : 0;
}

// Row visited at march step k (k = 0 is the boundary row).
std::size_t march_row(const SpaceTimeGrid& g, Orientation o, std::size_t k) {
  return o == Orientation::kForward ? g.nt() - 1 - k : k;
}

void check_positive_row(std::span<const double> row, double t) {
  for (double v : row)
    if (!(v > 0.0) || !std::isfinite(v))
      throw NumericalError("eta lost positivity at t = " + std::to_string(t) +
                           " (time step too large or V unbounded below)");
}

ScalarField march(const ProblemSpec& spec, const GridPtr& grid, Orientation o, const SolverConfig& cfg,
                  const ScalarField& obstacle, bool project, SolveStats* stats) {
  const auto& g = *grid;
  if (g.nx() < 3) throw InvalidArgument("solver needs at least 3 spatial nodes");
  ScalarField eta(grid);
  const std::size_t b = boundary_row(g, o);
  std::copy(obstacle.row(b).begin(), obstacle.row(b).end(), eta.row(b).begin());
  const Stencil st = make_stencil(spec, g, obstacle.row(b), cfg.far_field);
  std::vector<double> rhs;
  for (std::size_t k = 1; k < g.nt(); ++k) {
    const std::size_t n = march_row(g, o, k), prev = march_row(g, o, k - 1);
    fill_rhs(st, eta.row(prev), obstacle.row(n), rhs);
    auto x = eta.row(n);
    if (project) {
      std::copy(eta.row(prev).begin(), eta.row(prev).end(), x.begin());
      double res = 0.0;
      const std::size_t sweeps = psor(st, x, obstacle.row(n), rhs, cfg, res);
      if (stats) {
        stats->total_sweeps += sweeps;
        stats->max_sweeps = std::max(stats->max_sweeps, sweeps);
        stats->max_step_residual = std::max(stats->max_step_residual, res);
      }
    } else {
      solve_tridiagonal(st.a, st.b, st.c, rhs, x);
    }
    check_positive_row(x, g.t(n));
    if (stats) ++stats->steps;
  }
  return eta;
}

}  // namespace

void validate(const SolverConfig& cfg) {
  if (!(cfg.psor_tol > 0.0)) throw InvalidArgument("psor_tol must be positive");
  if (!(cfg.psor_omega > 0.0 && cfg.psor_omega < 2.0)) throw InvalidArgument("psor_omega must lie in (0, 2)");
  if (cfg.psor_max_iter < 1) throw InvalidArgument("psor_max_iter must be at least 1");
  if (cfg.region_abs_tol < 0.0 || cfg.region_rel_tol < 0.0) throw InvalidArgument("region tolerances must be >= 0");
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("solver config must be a JSON object");
  static const char* known[] = {"psor_tol", "psor_omega", "psor_max_iter", "region_abs_tol", "region_rel_tol",
                                "far_field", "far_field_padding"};
  for (const auto& [key, _] : j.items())
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
      throw InvalidArgument("solver config: unknown field '" + key + "'");
  SolverConfig c;
  auto num = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw InvalidArgument(std::string("solver config: field '") + key + "' must be a number");
    out = j[key].get<double>();
  };
  num("psor_tol", c.psor_tol);
  num("psor_omega", c.psor_omega);
  num("region_abs_tol", c.region_abs_tol);
  num("region_rel_tol", c.region_rel_tol);
  num("far_field_padding", c.far_field_padding);
  if (j.contains("psor_max_iter")) {
    if (!j["psor_max_iter"].is_number_integer())
      throw InvalidArgument("solver config: field 'psor_max_iter' must be an integer");
    c.psor_max_iter = j["psor_max_iter"].get<int>();
  }
  if (j.contains("far_field")) {
    const auto s = j["far_field"].is_string() ? j["far_field"].get<std::string>() : std::string();
    if (s == "log_slope") c.far_field = FarField::kLogSlope;
    else if (s == "obstacle") c.far_field = FarField::kObstacle;
    else throw InvalidArgument("solver config: field 'far_field' must be \"log_slope\" or \"obstacle\"");
  }
  validate(c);
  return c;
}

nlohmann::json to_json(const SolverConfig& c) {
  return {{"psor_tol", c.psor_tol},
          {"psor_omega", c.psor_omega},
          {"psor_max_iter", c.psor_max_iter},
          {"region_abs_tol", c.region_abs_tol},
          {"region_rel_tol", c.region_rel_tol},
          {"far_field", c.far_field == FarField::kLogSlope ? "log_slope" : "obstacle"},
          {"far_field_padding", c.far_field_padding}};
}

ScalarField obstacle_field(const ProblemSpec& spec, const GridPtr& grid, Orientation o) {
  const auto& cost = spec.stopping_cost(o);
  const auto& g = *grid;
  std::vector<double> row(g.nx());
  for (std::size_t i = 0; i < g.nx(); ++i) {
    row[i] = std::exp(-cost(g.x(i)) / spec.hbar);
    if (!(row[i] > 0.0) || !std::isfinite(row[i]))
      throw NumericalError("obstacle exp(-S/hbar) is not positive and finite at x = " + std::to_string(g.x(i)));
  }
  ScalarField out(grid);
  for (std::size_t n = 0; n < g.nt(); ++n) std::copy(row.begin(), row.end(), out.row(n).begin());
  return out;
}

namespace {

struct Padded {
  GridPtr grid;
  std::size_t pad;
};

Padded padded_grid(const ProblemSpec& spec, const GridPtr& grid, const SolverConfig& cfg) {
  const std::size_t m = padding_nodes(cfg, spec, grid->dx());
  if (m == 0) return {grid, 0};
  const auto& g = *grid;
  const double w = double(m) * g.dx();
  return {build_grid(g.x(0) - w, g.x(g.nx() - 1) + w, g.nx() + 2 * m, g.t(0), g.t(g.nt() - 1), g.nt()), m};
}

ScalarField restrict_to(const ScalarField& f, const GridPtr& grid, std::size_t pad) {
  if (pad == 0) return ScalarField(grid, f.values());
  RowMatrix v = f.values().middleCols(Eigen::Index(pad), Eigen::Index(grid->nx()));
  return ScalarField(grid, std::move(v));
}

}  // namespace

std::size_t padding_nodes(const SolverConfig& cfg, const ProblemSpec& spec, double dx) {
  const double w = cfg.far_field_padding < 0.0 ? 6.0 * std::sqrt(spec.hbar * 2.0 * spec.half_horizon)
                                               : cfg.far_field_padding;
  return static_cast<std::size_t>(std::ceil(w / dx - 1e-9));
}

EtaSolution solve_obstacle(const ProblemSpec& spec, const GridPtr& grid, Orientation o, const SolverConfig& cfg) {
  validate(spec);
  validate(cfg);
  const Padded comp = padded_grid(spec, grid, cfg);
  ScalarField comp_obstacle = obstacle_field(spec, comp.grid, o);
  SolveStats stats;
  ScalarField comp_eta = march(spec, comp.grid, o, cfg, comp_obstacle, true, &stats);
  ScalarField eta = restrict_to(comp_eta, grid, comp.pad);
  ScalarField obstacle = restrict_to(comp_obstacle, grid, comp.pad);
  RegionMask mask = region_from_eta(eta, obstacle, RegionTolerance{cfg.region_abs_tol, cfg.region_rel_tol}, o);
  std::vector<std::vector<double>> boundary(grid->nt());
  for (std::size_t n = 0; n < grid->nt(); ++n) boundary[n] = mask.free_boundary(n);
  return {std::move(eta), std::move(obstacle), std::move(mask), std::move(boundary), o, cfg, stats,
          std::move(comp_eta), std::move(comp_obstacle), comp.pad};
}

EtaSolution solve_forward_obstacle(const ProblemSpec& spec, const GridPtr& grid, const SolverConfig& cfg) {
  return solve_obstacle(spec, grid, Orientation::kForward, cfg);
}

EtaSolution solve_backward_obstacle(const ProblemSpec& spec, const GridPtr& grid, const SolverConfig& cfg) {
  return solve_obstacle(spec, grid, Orientation::kBackward, cfg);
}

ValueSolution value_from_eta(const EtaSolution& sol, double hbar) {
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be positive");
  const auto& grid = sol.eta.grid_ptr();
  if ((sol.eta.values().array() <= 0.0).any()) throw NumericalError("value_from_eta: non-positive eta");
  const ScalarField log_eta = log_field(sol.eta);
  RowMatrix u = -hbar * log_eta.values();
  const double sign = sol.orientation == Orientation::kForward ? 1.0 : -1.0;
  ScalarField drift = gradient_x(log_eta);
  const ScalarField obstacle_slope = gradient_x(log_field(sol.obstacle));
  for (std::size_t n = 0; n < grid->nt(); ++n)
    for (std::size_t i = 0; i < grid->nx(); ++i) {
      const double d = sol.mask.stopping(n, i) ? obstacle_slope(n, i) : drift(n, i);
      drift(n, i) = sign * hbar * d;
    }
  return {ScalarField(grid, std::move(u)), std::move(drift), sol.mask, sol.orientation};
}

namespace {

ScalarField computational_residual(const EtaSolution& sol, const ProblemSpec& spec) {
  const auto& grid = sol.computational_eta.grid_ptr();
  const auto& g = *grid;
  const auto& eta = sol.computational_eta;
  const auto& obstacle = sol.computational_obstacle;
  const std::size_t b = boundary_row(g, sol.orientation);
  const Stencil st = make_stencil(spec, g, obstacle.row(b), sol.config.far_field);
  ScalarField out(grid);
  for (std::size_t i = 0; i < g.nx(); ++i) out(b, i) = eta(b, i) - obstacle(b, i);
  std::vector<double> rhs;
  for (std::size_t k = 1; k < g.nt(); ++k) {
    const std::size_t n = march_row(g, sol.orientation, k), prev = march_row(g, sol.orientation, k - 1);
    fill_rhs(st, eta.row(prev), obstacle.row(n), rhs);
    const auto x = eta.row(n);
    for (std::size_t i = 0; i < g.nx(); ++i) out(n, i) = std::min(row_residual(st, x, rhs, i), x[i] - obstacle(n, i));
  }
  return out;
}

}  // namespace

ScalarField lcp_residual(const EtaSolution& sol, const ProblemSpec& spec) {
  return restrict_to(computational_residual(sol, spec), sol.eta.grid_ptr(), sol.pad_nodes);
}

double lcp_residual_norm(const EtaSolution& sol, const ProblemSpec& spec) {
  const ScalarField r = computational_residual(sol, spec);
  const double scale = std::max(1.0, sol.computational_eta.values().cwiseAbs().maxCoeff());
  return r.values().cwiseAbs().maxCoeff() / scale;
}

ScalarField classical_eta(const ProblemSpec& spec, const GridPtr& grid, Orientation o, const SolverConfig& cfg) {
  validate(spec);
  validate(cfg);
  const Padded comp = padded_grid(spec, grid, cfg);
  const ScalarField data = obstacle_field(spec, comp.grid, o);
  return restrict_to(march(spec, comp.grid, o, cfg, data, false, nullptr), grid, comp.pad);
}
ValueSolution classical_value(const ProblemSpec& spec, const GridPtr& grid, Orientation o, const SolverConfig& cfg) {
  const ScalarField eta = classical_eta(spec, grid, o, cfg);
  const ScalarField log_eta = log_field(eta);
  RowMatrix u = -spec.hbar * log_eta.values();
  ScalarField drift = gradient_x(log_eta);
  drift.values() *= (o == Orientation::kForward ? 1.0 : -1.0) * spec.hbar;
  return {ScalarField(grid, std::move(u)), std::move(drift), RegionMask(grid, Region::kContinuation), o};
}

}  // namespace bernstein::hjb
