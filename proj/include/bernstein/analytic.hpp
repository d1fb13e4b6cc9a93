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

#include <functional>

namespace bernstein::analytic {

/// Free heat kernel of H = -(hbar^2/2) d^2/dx^2 (V = 0 only).
struct KernelParams {
  double hbar = 1.0;
};

struct QuadratureConfig {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  /// Integration window: mean +- tail_sigmas standard deviations of the
  /// Gaussian factor.
  double tail_sigmas = 10.0;
  /// Maximum bisection depth per panel.
  unsigned max_subdivisions = 20;
};

void validate(const QuadratureConfig& q);

/// Adaptive 15-point Gauss-Kronrod on [a, b]. Throws ConvergenceError if the
/// error estimate stays above max(abs_tol, rel_tol * L1) at full depth.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& q);

/// h(s, x, t, y) = (2 pi hbar (t - s))^{-1/2} exp(-(x - y)^2 / (2 hbar (t - s))).
double heat_kernel(double s, double x, double t, double y, const KernelParams& p);
double log_heat_kernel(double s, double x, double t, double y, const KernelParams& p);

/// Q = h(s,x,t,y) h(t,y,u,z) / h(s,x,u,z), evaluated in log space.
double bernstein_transition(double s, double x, double t, double y, double u, double z,
                            const KernelParams& p);

// ---------------------------------------------------------------------------
// The worked example: V = 0, S = |x|, S* = log(1 + |x|), horizon [-T/2, T/2].
// `horizon` is T. Point x = 0 is the free boundary; values there are the
// known boundary values rather than quadrature limits.
// ---------------------------------------------------------------------------

/// eta(t, x) = exp(-U(t, x) / hbar) for the forward optimal stopping problem
/// (image-method solution on each half-line with eta(t, 0) = 1).
double sec7_eta_forward(double t, double x, double hbar, double horizon,
                        const QuadratureConfig& q = {});

/// eta*(t, x) = exp(-U*(t, x) / hbar) for the backward problem.
double sec7_eta_backward(double t, double x, double hbar, double horizon,
                         const QuadratureConfig& q = {});

/// Whole-line heat evolutions without stopping: terminal exp(-|x|/hbar) and
/// initial (1 + |x|)^{-1/hbar}.
double sec7_classical_eta(double t, double x, double hbar, double horizon,
                          const QuadratureConfig& q = {});
double sec7_classical_eta_star(double t, double x, double hbar, double horizon,
                               const QuadratureConfig& q = {});

struct DriftEvaluation {
  double under_integral;     // derivative taken inside the quadrature
  double finite_difference;  // hbar * centered difference of log eta
};

/// Forward optimal drift hbar d/dx log eta and backward drift
/// -hbar d/dx log eta*. Both routes are evaluated; the call throws
/// NumericalError if they disagree by more than `agreement_tol` (absolute,
/// scaled by max(1, |drift|)).
double sec7_drift_forward(double t, double x, double hbar, double horizon,
                          const QuadratureConfig& q = {}, double agreement_tol = 1e-5);
double sec7_drift_backward(double t, double x, double hbar, double horizon,
                           const QuadratureConfig& q = {}, double agreement_tol = 1e-5);

DriftEvaluation sec7_drift_forward_routes(double t, double x, double hbar, double horizon,
                                          const QuadratureConfig& q = {});
DriftEvaluation sec7_drift_backward_routes(double t, double x, double hbar, double horizon,
                                           const QuadratureConfig& q = {});

}  // namespace bernstein::analytic
