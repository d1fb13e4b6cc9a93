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

#include "bernstein/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bernstein/errors.hpp"

namespace bernstein::analytic {
namespace {

constexpr double kPi = std::numbers::pi;

void require_hbar(double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("hbar must be positive");
}

double gauss(double z, double var) {
  return std::exp(-z * z / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
}

// Integral over the half-line on the side of x of
//   [G(x - y) - G(x + y)] (w(y) - 1)          (derivative = false)
//   d/dx [G(x - y) - G(x + y)] (w(y) - 1)     (derivative = true)
// with G the centred Gaussian of variance var. The image term keeps the
// integral zero at x = 0.
template <class Weight>
double image_integral(double x, double var, Weight&& w, bool derivative, const QuadratureConfig& q) {
  const double sigma = std::sqrt(var);
  const double reach = q.tail_sigmas * sigma;
  // G(x + y) = G(x - y) e^{-2xy/var}; expm1 avoids the cancellation near x = 0.
  auto f = [&](double y) {
    const double ga = gauss(x - y, var), em1 = std::expm1(-2.0 * x * y / var);
    const double kernel = derivative ? ga * (x * em1 + y * (em1 + 2.0)) / var : -ga * em1;
    return kernel * (w(y) - 1.0);
  };
  if (x > 0.0) {
    const double lo = std::max(0.0, x - reach);
    return integrate(f, lo, x, q) + integrate(f, x, x + reach, q);
  }
  const double hi = std::min(0.0, x + reach);
  return integrate(f, x - reach, x, q) + integrate(f, x, hi, q);
}

// Whole-line Gaussian smoothing of w, split at the kink y = 0 when it lies
// inside the window.
template <class Weight>
double whole_line(double x, double var, Weight&& w, const QuadratureConfig& q) {
  const double reach = q.tail_sigmas * std::sqrt(var);
  auto f = [&](double y) { return gauss(x - y, var) * w(y); };
  const double a = x - reach, b = x + reach;
  if (a < 0.0 && b > 0.0) {
    double lo = std::min(0.0, x), hi = std::max(0.0, x);
    double sum = integrate(f, a, lo, q) + integrate(f, hi, b, q);
    if (hi > lo) sum += integrate(f, lo, hi, q);
    return sum;
  }
  return integrate(f, a, x, q) + integrate(f, x, b, q);
}

void check_time(double t, double horizon) {
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (t < -horizon / 2.0 || t > horizon / 2.0)
    throw InvalidArgument("time " + std::to_string(t) + " outside the horizon");
}

struct ForwardWeight {
  double hbar;
  double operator()(double y) const { return std::exp(-std::abs(y) / hbar); }
};

struct BackwardWeight {
  double hbar;
  double operator()(double y) const { return std::pow(1.0 + std::abs(y), -1.0 / hbar); }
};

template <class Weight>
double eta_stopped(double tau, double x, double hbar, Weight w, const QuadratureConfig& q) {
  if (x == 0.0) return 1.0;
  if (tau <= 0.0) return w(x);
  return 1.0 + image_integral(x, hbar * tau, w, false, q);
}

template <class Weight>
double eta_stopped_dx(double tau, double x, double hbar, Weight w, const QuadratureConfig& q) {
  return image_integral(x, hbar * tau, w, true, q);
}

}  // namespace

void validate(const QuadratureConfig& q) {
  if (!(q.abs_tol > 0.0) || !(q.rel_tol > 0.0)) throw InvalidArgument("quadrature tolerances must be positive");
  if (!(q.tail_sigmas >= 6.0)) throw InvalidArgument("tail_sigmas must be at least 6");
  if (q.max_subdivisions == 0) throw InvalidArgument("max_subdivisions must be positive");
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& q) {
  if (a == b) return 0.0;
  double error = 0.0, l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, q.max_subdivisions, 0.1 * q.rel_tol, &error, &l1);
  if (!std::isfinite(value)) throw NumericalError("integrate: non-finite result");
  if (error > std::max(q.abs_tol, q.rel_tol * l1))
  {
    char msg[160];
    std::snprintf(msg, sizeof msg, "integrate: error estimate %.3g (L1 %.3g) on [%.6g, %.6g] exceeds tolerance",
                  error, l1, a, b);
    throw ConvergenceError(msg, {error});
  }
  return value;
}

double log_heat_kernel(double s, double x, double t, double y, const KernelParams& p) {
  require_hbar(p.hbar);
  if (!(t > s)) throw InvalidArgument("heat_kernel: requires t > s");
  const double var = p.hbar * (t - s);
  return -0.5 * std::log(2.0 * kPi * var) - (x - y) * (x - y) / (2.0 * var);
}

double heat_kernel(double s, double x, double t, double y, const KernelParams& p) {
  return std::exp(log_heat_kernel(s, x, t, y, p));
}

double bernstein_transition(double s, double x, double t, double y, double u, double z,
                            const KernelParams& p) {
  if (!(s < t && t < u)) throw InvalidArgument("bernstein_transition: requires s < t < u");
  return std::exp(log_heat_kernel(s, x, t, y, p) + log_heat_kernel(t, y, u, z, p) -
                  log_heat_kernel(s, x, u, z, p));
}

double sec7_eta_forward(double t, double x, double hbar, double horizon, const QuadratureConfig& q) {
  require_hbar(hbar);
  check_time(t, horizon);
  return eta_stopped(horizon / 2.0 - t, x, hbar, ForwardWeight{hbar}, q);
}

double sec7_eta_backward(double t, double x, double hbar, double horizon, const QuadratureConfig& q) {
  require_hbar(hbar);
  check_time(t, horizon);
  return eta_stopped(t + horizon / 2.0, x, hbar, BackwardWeight{hbar}, q);
}

double sec7_classical_eta(double t, double x, double hbar, double horizon, const QuadratureConfig& q) {
  require_hbar(hbar);
  check_time(t, horizon);
  const double tau = horizon / 2.0 - t;
  if (tau <= 0.0) return ForwardWeight{hbar}(x);
  return whole_line(x, hbar * tau, ForwardWeight{hbar}, q);
}

double sec7_classical_eta_star(double t, double x, double hbar, double horizon,
                               const QuadratureConfig& q) {
  require_hbar(hbar);
  check_time(t, horizon);
  const double tau = t + horizon / 2.0;
  if (tau <= 0.0) return BackwardWeight{hbar}(x);
  return whole_line(x, hbar * tau, BackwardWeight{hbar}, q);
}

namespace {

template <class Weight>
DriftEvaluation drift_routes(double tau, double x, double hbar, Weight w, const QuadratureConfig& q) {
  if (x == 0.0) throw InvalidArgument("drift is undefined on the free boundary x = 0");
  if (!(tau > 0.0)) throw InvalidArgument("drift requires an interior time");
  DriftEvaluation out{};
  const double eta = eta_stopped(tau, x, hbar, w, q);
  out.under_integral = hbar * eta_stopped_dx(tau, x, hbar, w, q) / eta;
  const double h = std::min(1e-4, std::abs(x) / 2.0);
  const double up = eta_stopped(tau, x + h, hbar, w, q);
  const double down = eta_stopped(tau, x - h, hbar, w, q);
  out.finite_difference = hbar * (std::log(up) - std::log(down)) / (2.0 * h);
  return out;
}

double agreed(const DriftEvaluation& d, double tol, const char* what) {
  const double scale = std::max(1.0, std::abs(d.under_integral));
  if (!(std::abs(d.under_integral - d.finite_difference) <= tol * scale))
    throw NumericalError(std::string(what) + ": quadrature derivative " +
                         std::to_string(d.under_integral) + " disagrees with finite difference " +
                         std::to_string(d.finite_difference));
  return d.under_integral;
}

}  // namespace

DriftEvaluation sec7_drift_forward_routes(double t, double x, double hbar, double horizon,
                                          const QuadratureConfig& q) {
  require_hbar(hbar);
  check_time(t, horizon);
  return drift_routes(horizon / 2.0 - t, x, hbar, ForwardWeight{hbar}, q);
}

DriftEvaluation sec7_drift_backward_routes(double t, double x, double hbar, double horizon,
                                           const QuadratureConfig& q) {
  require_hbar(hbar);
  check_time(t, horizon);
  auto d = drift_routes(t + horizon / 2.0, x, hbar, BackwardWeight{hbar}, q);
  // The backward drift carries the opposite sign: -hbar d/dx log eta*.
  return {-d.under_integral, -d.finite_difference};
}

double sec7_drift_forward(double t, double x, double hbar, double horizon, const QuadratureConfig& q,
                          double agreement_tol) {
  return agreed(sec7_drift_forward_routes(t, x, hbar, horizon, q), agreement_tol, "sec7_drift_forward");
}

double sec7_drift_backward(double t, double x, double hbar, double horizon, const QuadratureConfig& q,
                           double agreement_tol) {
  return agreed(sec7_drift_backward_routes(t, x, hbar, horizon, q), agreement_tol,
                "sec7_drift_backward");
}

}  // namespace bernstein::analytic
