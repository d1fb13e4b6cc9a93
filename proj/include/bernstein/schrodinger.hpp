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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bernstein/core.hpp"

namespace bernstein::schrodinger {

/// Endpoint densities on the spatial grid, each of unit trapezoid mass.
struct MarginalPair {
  std::vector<double> p_init;
  std::vector<double> p_final;
  /// Mass lost to the spatial truncation before renormalization (1 - mass).
  double truncation_init = 0.0;
  double truncation_final = 0.0;
};

/// Renormalizes both densities to unit trapezoid mass and records the
/// truncation. Throws unless every entry is strictly positive and finite.
MarginalPair make_marginals(std::span<const double> p_init, std::span<const double> p_final,
                            double dx);

/// K[i][j] = h(s, xs[i], t, xs[j]) * dx.
Eigen::MatrixXd kernel_matrix(std::span<const double> xs, double dx, double hbar, double s, double t);
Eigen::MatrixXd kernel_matrix(const SpaceTimeGrid& grid, double hbar, double s, double t);

struct SinkhornOptions {
  double tol = 1e-8;
  int max_iter = 500;
  /// Node where eta*_{-T/2} is pinned to 1; defaults to the middle node.
  std::ptrdiff_t gauge_index = -1;
  /// Work with log-factors and log-sum-exp. When unset the log domain is
  /// chosen automatically if the kernel has underflowing entries.
  enum class Domain { kAuto, kLinear, kLog } domain = Domain::kAuto;
};

struct SchrodingerFactors {
  std::vector<double> eta_star_init;  // eta*_{-T/2}
  std::vector<double> eta_final;      // eta_{T/2}
  int iterations = 0;
  double final_marginal_error = 0.0;
  std::vector<double> residual_trace;
  /// False if the residual increased after the first sweep.
  bool monotone_residual = true;
  bool log_domain = false;
  std::size_t gauge_index = 0;
};

/// Alternating exact updates eta* <- p_init / (K eta), eta <- p_final / (K^T eta*)
/// until both marginal residuals (infinity norm) are at most `tol`.
SchrodingerFactors sinkhorn_solve(const MarginalPair& m, const Eigen::MatrixXd& kernel,
                                  const SinkhornOptions& opts = {});

/// Same, from a log-kernel (needed when the kernel underflows).
SchrodingerFactors sinkhorn_solve_log(const MarginalPair& m, const Eigen::MatrixXd& log_kernel,
                                      const SinkhornOptions& opts = {});

/// Both marginals recomposed from the factors: (eta* .* K eta, eta .* K^T eta*).
std::pair<std::vector<double>, std::vector<double>> recompose_marginals(
    const SchrodingerFactors& f, const Eigen::MatrixXd& kernel);

/// Multiplies eta* by c and eta by 1/c.
SchrodingerFactors rescale_gauge(SchrodingerFactors f, double c);

/// eta(t, x) = sum_j h(t, x, T/2, x_j) eta_{T/2}(x_j) dx, with the t = T/2 row
/// equal to eta_{T/2}. Accumulated with log-sum-exp.
ScalarField propagate_eta(const SchrodingerFactors& f, const GridPtr& grid, double hbar);

/// eta*(t, x) = sum_j eta*_{-T/2}(x_j) h(-T/2, x_j, t, x) dx.
ScalarField propagate_eta_star(const SchrodingerFactors& f, const GridPtr& grid, double hbar);

/// Forward drift hbar d/dx log eta obtained by differentiating the kernel
/// sum: B(t, x) = sum_j (x_j - x) / (T/2 - t) w_j / sum_j w_j with
/// w_j = h(t, x, T/2, x_j) eta_{T/2}(x_j). The t = T/2 row falls back to
/// central differences of log eta_{T/2}.
ScalarField drift_from_factors(const SchrodingerFactors& f, const GridPtr& grid, double hbar);

/// rho = eta * eta*, nodewise.
ScalarField bernstein_density(const ScalarField& eta, const ScalarField& eta_star);

/// Trapezoid mass of every time slice.
std::vector<double> slice_masses(const ScalarField& rho);

/// Full pipeline on a grid: kernel over the whole horizon, Sinkhorn, both
/// propagations and the density.
struct SchrodingerSolution {
  SchrodingerFactors factors;
  ScalarField eta;
  ScalarField eta_star;
  ScalarField rho;
};

SchrodingerSolution solve_schrodinger(const MarginalPair& m, const GridPtr& grid, double hbar,
                                      const SinkhornOptions& opts = {});

/// Normal density samples on the grid nodes.
std::vector<double> gaussian_density(const SpaceTimeGrid& grid, double mean, double sd);

}  // namespace bernstein::schrodinger
