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

#include "bernstein/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bernstein/analytic.hpp"
#include "bernstein/errors.hpp"

namespace bernstein::schrodinger {
namespace {

void require_positive(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0) || !std::isfinite(v[i]))
      throw InvalidArgument(std::string(what) + " must be strictly positive and finite (index " +
                            std::to_string(i) + ")");
}

double mass(std::span<const double> p, double dx) {
  return p.size() == 1 ? p[0] * dx : trapezoid(p, dx);
}

double log_sum_exp(const std::vector<double>& a) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : a) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : a) s += std::exp(v - m);
  return m + std::log(s);
}

double inf_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

std::size_t resolve_gauge(const SinkhornOptions& o, std::size_t n) {
  if (o.gauge_index < 0) return n / 2;
  if (static_cast<std::size_t>(o.gauge_index) >= n) throw InvalidArgument("gauge index out of range");
  return static_cast<std::size_t>(o.gauge_index);
}

void check_inputs(const MarginalPair& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.p_init.size() != static_cast<std::size_t>(rows) || m.p_final.size() != static_cast<std::size_t>(cols))
    throw InvalidArgument("marginal sizes do not match the kernel");
  require_positive(m.p_init, "p_init");
  require_positive(m.p_final, "p_final");
}

void track(SchrodingerFactors& f, double res) {
  if (f.residual_trace.size() >= 2 && res > f.residual_trace.back() * (1.0 + 1e-12) + 1e-300)
    f.monotone_residual = false;
  f.residual_trace.push_back(res);
}

}  // namespace

MarginalPair make_marginals(std::span<const double> p_init, std::span<const double> p_final, double dx) {
  if (p_init.size() != p_final.size() || p_init.empty())
    throw InvalidArgument("marginals must be non-empty and of equal length");
  if (!(dx > 0.0)) throw InvalidArgument("dx must be positive");
  require_positive(p_init, "p_init");
  require_positive(p_final, "p_final");
  MarginalPair m;
  const double a = mass(p_init, dx), b = mass(p_final, dx);
  m.truncation_init = 1.0 - a;
  m.truncation_final = 1.0 - b;
  m.p_init.assign(p_init.begin(), p_init.end());
  m.p_final.assign(p_final.begin(), p_final.end());
  for (double& v : m.p_init) v /= a;
  for (double& v : m.p_final) v /= b;
  return m;
}

Eigen::MatrixXd kernel_matrix(std::span<const double> xs, double dx, double hbar, double s, double t) {
  if (!(t > s)) throw InvalidArgument("kernel_matrix requires t > s");
  const analytic::KernelParams p{hbar};
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = analytic::heat_kernel(s, xs[i], t, xs[j], p) * dx;
  return k;
}

Eigen::MatrixXd kernel_matrix(const SpaceTimeGrid& grid, double hbar, double s, double t) {
  return kernel_matrix(grid.xs(), grid.dx(), hbar, s, t);
}

SchrodingerFactors sinkhorn_solve(const MarginalPair& m, const Eigen::MatrixXd& kernel,
                                  const SinkhornOptions& opts) {
  if (opts.domain == SinkhornOptions::Domain::kLog ||
      (opts.domain == SinkhornOptions::Domain::kAuto && !(kernel.array() > 0.0).all())) {
    if ((kernel.array() < 0.0).any()) throw InvalidArgument("kernel has negative entries");
    return sinkhorn_solve_log(m, kernel.array().log().matrix(), opts);
  }
  check_inputs(m, kernel.rows(), kernel.cols());
  if (!(kernel.array() > 0.0).all()) throw InvalidArgument("kernel must be strictly positive");

  const auto n = kernel.rows();
  const Eigen::Map<const Eigen::VectorXd> p0(m.p_init.data(), n), p1(m.p_final.data(), n);
  Eigen::VectorXd es = Eigen::VectorXd::Ones(n), e = Eigen::VectorXd::Ones(n);
  SchrodingerFactors f;
  f.gauge_index = resolve_gauge(opts, static_cast<std::size_t>(n));

  for (int it = 1; it <= opts.max_iter; ++it) {
    es = p0.cwiseQuotient(kernel * e);
    e = p1.cwiseQuotient(kernel.transpose() * es);
    if (!es.allFinite() || !e.allFinite() || (es.array() <= 0.0).any() || (e.array() <= 0.0).any())
      throw NumericalError("sinkhorn: non-positive or non-finite factor at iteration " + std::to_string(it));
    // After the eta update the final marginal is exact; the initial one carries the residual.
    const double res = (es.cwiseProduct(kernel * e) - p0).cwiseAbs().maxCoeff();
    track(f, res);
    f.iterations = it;
    if (res <= opts.tol) break;
  }
  f.final_marginal_error = f.residual_trace.empty() ? 0.0 : f.residual_trace.back();
  if (f.final_marginal_error > opts.tol)
    throw ConvergenceError("sinkhorn: residual " + std::to_string(f.final_marginal_error) + " after " +
                               std::to_string(opts.max_iter) + " iterations",
                           f.residual_trace);
  const double c = 1.0 / es[Eigen::Index(f.gauge_index)];
  f.eta_star_init.assign(es.data(), es.data() + n);
  f.eta_final.assign(e.data(), e.data() + n);
  return rescale_gauge(std::move(f), c);
}

SchrodingerFactors sinkhorn_solve_log(const MarginalPair& m, const Eigen::MatrixXd& log_kernel,
                                      const SinkhornOptions& opts) {
  check_inputs(m, log_kernel.rows(), log_kernel.cols());
  const auto n = static_cast<std::size_t>(log_kernel.rows());
  std::vector<double> lp0(n), lp1(n), les(n, 0.0), le(n, 0.0), buf(n);
  for (std::size_t i = 0; i < n; ++i) {
    lp0[i] = std::log(m.p_init[i]);
    lp1[i] = std::log(m.p_final[i]);
  }
  auto apply = [&](const std::vector<double>& lv, bool transpose, std::vector<double>& out) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        buf[j] = (transpose ? log_kernel(Eigen::Index(j), Eigen::Index(i))
                            : log_kernel(Eigen::Index(i), Eigen::Index(j))) + lv[j];
      out[i] = log_sum_exp(buf);
    }
  };

  SchrodingerFactors f;
  f.log_domain = true;
  f.gauge_index = resolve_gauge(opts, n);
  std::vector<double> ke, kes, recon(n), target(m.p_init);
  for (int it = 1; it <= opts.max_iter; ++it) {
    apply(le, false, ke);
    for (std::size_t i = 0; i < n; ++i) les[i] = lp0[i] - ke[i];
    apply(les, true, kes);
    for (std::size_t i = 0; i < n; ++i) le[i] = lp1[i] - kes[i];
    apply(le, false, ke);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(les[i]) || !std::isfinite(le[i]))
        throw NumericalError("sinkhorn (log): non-finite factor at iteration " + std::to_string(it));
      recon[i] = std::exp(les[i] + ke[i]);
    }
    const double res = inf_norm_diff(recon, target);
    track(f, res);
    f.iterations = it;
    if (res <= opts.tol) break;
  }
  f.final_marginal_error = f.residual_trace.empty() ? 0.0 : f.residual_trace.back();
  if (f.final_marginal_error > opts.tol)
    throw ConvergenceError("sinkhorn (log): residual " + std::to_string(f.final_marginal_error) +
                               " after " + std::to_string(opts.max_iter) + " iterations",
                           f.residual_trace);
  const double shift = les[f.gauge_index];
  f.eta_star_init.resize(n);
  f.eta_final.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.eta_star_init[i] = std::exp(les[i] - shift);
    f.eta_final[i] = std::exp(le[i] + shift);
  }
  return f;
}

std::pair<std::vector<double>, std::vector<double>> recompose_marginals(const SchrodingerFactors& f,
                                                                        const Eigen::MatrixXd& kernel) {
  const auto n = kernel.rows();
  const Eigen::Map<const Eigen::VectorXd> es(f.eta_star_init.data(), n), e(f.eta_final.data(), n);
  const Eigen::VectorXd a = es.cwiseProduct(kernel * e);
  const Eigen::VectorXd b = e.cwiseProduct(kernel.transpose() * es);
  return {std::vector<double>(a.data(), a.data() + n), std::vector<double>(b.data(), b.data() + n)};
}

SchrodingerFactors rescale_gauge(SchrodingerFactors f, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("gauge factor must be positive");
  for (double& v : f.eta_star_init) v *= c;
  for (double& v : f.eta_final) v /= c;
  return f;
}

namespace {

// Row t of a kernel-propagated field: log sum_j exp(log h(.) + log w_j + log dx).
// `from_end` selects eta (kernel to T/2) versus eta* (kernel from -T/2).
ScalarField propagate(const std::vector<double>& weights, const GridPtr& grid, double hbar, bool from_end) {
  const auto& g = *grid;
  if (weights.size() != g.nx()) throw InvalidArgument("factor length does not match the grid");
  require_positive(weights, "boundary factor");
  const analytic::KernelParams p{hbar};
  std::vector<double> lw(g.nx()), buf(g.nx());
  for (std::size_t j = 0; j < g.nx(); ++j) lw[j] = std::log(weights[j]) + std::log(g.dx());
  const std::size_t boundary = from_end ? g.nt() - 1 : 0;
  const double t_b = g.t(boundary);
  ScalarField out(grid);
  for (std::size_t n = 0; n < g.nt(); ++n) {
    if (n == boundary) {
      std::copy(weights.begin(), weights.end(), out.row(n).begin());
      continue;
    }
    for (std::size_t i = 0; i < g.nx(); ++i) {
      for (std::size_t j = 0; j < g.nx(); ++j)
        buf[j] = lw[j] + (from_end ? analytic::log_heat_kernel(g.t(n), g.x(i), t_b, g.x(j), p)
                                   : analytic::log_heat_kernel(t_b, g.x(j), g.t(n), g.x(i), p));
      out(n, i) = std::exp(log_sum_exp(buf));
    }
  }
  if (!out.all_finite()) throw NumericalError("propagated factor is not finite");
  return out;
}

}  // namespace

ScalarField propagate_eta(const SchrodingerFactors& f, const GridPtr& grid, double hbar) {
  return propagate(f.eta_final, grid, hbar, true);
}

ScalarField propagate_eta_star(const SchrodingerFactors& f, const GridPtr& grid, double hbar) {
  return propagate(f.eta_star_init, grid, hbar, false);
}

ScalarField drift_from_factors(const SchrodingerFactors& f, const GridPtr& grid, double hbar) {
  const auto& g = *grid;
  if (f.eta_final.size() != g.nx()) throw InvalidArgument("factor length does not match the grid");
  const analytic::KernelParams p{hbar};
  const double t_end = g.t(g.nt() - 1);
  std::vector<double> lw(g.nx()), buf(g.nx());
  for (std::size_t j = 0; j < g.nx(); ++j) lw[j] = std::log(f.eta_final[j]);
  ScalarField out(grid);
  for (std::size_t n = 0; n + 1 < g.nt(); ++n) {
    const double tau = t_end - g.t(n);
    for (std::size_t i = 0; i < g.nx(); ++i) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < g.nx(); ++j) {
        buf[j] = lw[j] + analytic::log_heat_kernel(g.t(n), g.x(i), t_end, g.x(j), p);
        m = std::max(m, buf[j]);
      }
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < g.nx(); ++j) {
        const double w = std::exp(buf[j] - m);
        num += (g.x(j) - g.x(i)) * w;
        den += w;
      }
      out(n, i) = num / den / tau;
    }
  }
  // Boundary row: differentiate the factor itself.
  ScalarField log_end(grid, 0.0);
  for (std::size_t i = 0; i < g.nx(); ++i) log_end(g.nt() - 1, i) = lw[i];
  const ScalarField d = gradient_x(log_end);
  for (std::size_t i = 0; i < g.nx(); ++i) out(g.nt() - 1, i) = hbar * d(g.nt() - 1, i);
  return out;
}

ScalarField bernstein_density(const ScalarField& eta, const ScalarField& eta_star) {
  if (!same_grid(eta.grid_ptr(), eta_star.grid_ptr())) throw InvalidArgument("bernstein_density: grid mismatch");
  RowMatrix v = eta.values().cwiseProduct(eta_star.values());
  return ScalarField(eta.grid_ptr(), std::move(v));
}

std::vector<double> slice_masses(const ScalarField& rho) {
  std::vector<double> out(rho.grid().nt());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = trapezoid(rho.row(n), rho.grid().dx());
  return out;
}

SchrodingerSolution solve_schrodinger(const MarginalPair& m, const GridPtr& grid, double hbar,
                                      const SinkhornOptions& opts) {
  const auto& g = *grid;
  const double s = g.t(0), t = g.t(g.nt() - 1);
  SchrodingerFactors f;
  if (opts.domain == SinkhornOptions::Domain::kLog) {
    const analytic::KernelParams p{hbar};
    Eigen::MatrixXd lk(g.nx(), g.nx());
    for (std::size_t i = 0; i < g.nx(); ++i)
      for (std::size_t j = 0; j < g.nx(); ++j)
        lk(Eigen::Index(i), Eigen::Index(j)) = analytic::log_heat_kernel(s, g.x(i), t, g.x(j), p) + std::log(g.dx());
    f = sinkhorn_solve_log(m, lk, opts);
  } else {
    f = sinkhorn_solve(m, kernel_matrix(g, hbar, s, t), opts);
  }
  ScalarField eta = propagate_eta(f, grid, hbar);
  ScalarField eta_star = propagate_eta_star(f, grid, hbar);
  ScalarField rho = bernstein_density(eta, eta_star);
  return {std::move(f), std::move(eta), std::move(eta_star), std::move(rho)};
}

std::vector<double> gaussian_density(const SpaceTimeGrid& grid, double mean, double sd) {
  if (!(sd > 0.0)) throw InvalidArgument("standard deviation must be positive");
  std::vector<double> out(grid.nx());
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    const double z = (grid.x(i) - mean) / sd;
    out[i] = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
  }
  return out;
}

}  // namespace bernstein::schrodinger
