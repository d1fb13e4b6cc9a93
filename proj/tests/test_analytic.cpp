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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bernstein/analytic.hpp"
#include "bernstein/errors.hpp"

using namespace bernstein;
using namespace bernstein::analytic;

// Reference values below were computed independently in extended precision
// (direct quadrature of the Gaussian-kernel representations) and frozen here.

namespace {
constexpr double kRel = 1e-9;
}

TEST_CASE("heat kernel values") {
  const KernelParams p{1.0};
  CHECK(heat_kernel(0, 0, 1, 0, p) == doctest::Approx(0.39894228040143268).epsilon(1e-14));
  CHECK(heat_kernel(0, 0, 1, 1, p) == doctest::Approx(0.24197072451914335).epsilon(1e-14));
  CHECK(heat_kernel(0, 2, 1, 1, p) == doctest::Approx(0.24197072451914335).epsilon(1e-14));
  CHECK(log_heat_kernel(0, 0, 1, 1, p) == doctest::Approx(std::log(0.24197072451914335)).epsilon(1e-14));
  CHECK_THROWS_AS(heat_kernel(1, 0, 1, 0, p), InvalidArgument);
}

TEST_CASE("Bernstein transition: pinned midpoint density") {
  const KernelParams p{1.0};
  // x = z = 0 over [0, 1]: Z_{1/2} ~ N(0, 1/4), peak 1/sqrt(2 pi / 4).
  CHECK(bernstein_transition(0, 0, 0.5, 0, 1, 0, p) == doctest::Approx(0.79788456080286536).epsilon(1e-13));
  QuadratureConfig q;
  const double mass = integrate([&](double y) { return bernstein_transition(0, 0, 0.3, y, 1, 2, p); }, -8, 10, q);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("adaptive quadrature") {
  QuadratureConfig q;
  CHECK(integrate([](double x) { return std::exp(-x * x / 2); }, -1, 1, q) ==
        doctest::Approx(std::sqrt(2 * M_PI) * 0.6826894921370859).epsilon(1e-11));
  q.rel_tol = -1;
  CHECK_THROWS_AS(validate(q), InvalidArgument);
}

TEST_CASE("forward closed-form eta") {
  CHECK(sec7_eta_forward(0, 1, 1, 1) == doctest::Approx(0.4572635182660766257).epsilon(kRel));
  CHECK(sec7_eta_forward(0, -1, 1, 1) == doctest::Approx(0.4572635182660766257).epsilon(kRel));
  CHECK(sec7_eta_forward(0, 0.5, 1, 1) == doctest::Approx(0.70239930175334880946).epsilon(kRel));
  CHECK(sec7_eta_forward(-0.5, 1, 1, 1) == doctest::Approx(0.518616820018327236).epsilon(kRel));
  CHECK(-std::log(sec7_eta_forward(-0.5, 1, 1, 1)) == doctest::Approx(0.65658997289344844).epsilon(kRel));
  CHECK(sec7_eta_forward(0, -3, 1, 1) == doctest::Approx(0.063927361537854353692).epsilon(kRel));
  CHECK(sec7_eta_forward(0.25, 0.3, 1, 1) == doctest::Approx(0.79415499641195138951).epsilon(kRel));
  CHECK(sec7_eta_forward(0.4, 2, 1, 1) == doctest::Approx(0.142274071585944909).epsilon(kRel));
}

TEST_CASE("forward eta meets its obstacle on the barrier and at the horizon") {
  CHECK(sec7_eta_forward(0.1, 0.0, 1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sec7_eta_forward(0.5, 1.3, 1, 1) == doctest::Approx(std::exp(-1.3)).epsilon(1e-12));
  CHECK(sec7_eta_forward(0.0, 1.0, 1, 1) > std::exp(-1.0));
}

TEST_CASE("backward closed-form eta*") {
  CHECK(sec7_eta_backward(0.25, -1, 1, 1) == doctest::Approx(0.59942031452343608821).epsilon(kRel));
  CHECK(sec7_eta_backward(0, 1, 1, 1) == doctest::Approx(0.5715947760065771971).epsilon(kRel));
  CHECK(sec7_eta_backward(0.5, 0.5, 1, 1) == doctest::Approx(0.79828212141557686683).epsilon(kRel));
  CHECK(sec7_eta_backward(-0.25, 2, 1, 1) == doctest::Approx(0.3434982654849689173).epsilon(kRel));
  CHECK(sec7_eta_backward(-0.5, 2, 1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("classical fixed-horizon eta and eta*") {
  CHECK(sec7_classical_eta(0, 0, 1, 1) == doctest::Approx(0.61569034419292587487).epsilon(kRel));
  CHECK(sec7_classical_eta(0, 1, 1, 1) == doctest::Approx(0.41826897450989137024).epsilon(kRel));
  CHECK(-std::log(sec7_classical_eta(0, 1, 1, 1)) == doctest::Approx(0.87163057371292877).epsilon(kRel));
  CHECK(sec7_classical_eta_star(0, 0, 1, 1) == doctest::Approx(0.68282020679318929656).epsilon(kRel));
  // Stopping can only lower the cost.
  CHECK(sec7_eta_forward(0, 1, 1, 1) > sec7_classical_eta(0, 1, 1, 1));
}

TEST_CASE("closed-form drifts") {
  CHECK(sec7_drift_forward(0, 0.5, 1, 1) == doctest::Approx(-0.79143245461285677).epsilon(1e-8));
  CHECK(sec7_drift_forward(0, 1, 1, 1) == doctest::Approx(-0.91472194435267683).epsilon(1e-8));
  CHECK(sec7_drift_forward(0, -1, 1, 1) == doctest::Approx(0.91472194435267683).epsilon(1e-8));
  CHECK(sec7_drift_forward(0, -5, 1, 1) == doctest::Approx(0.9999999999843612).epsilon(1e-8));
  CHECK(sec7_drift_forward(0.25, 2, 1, 1) == doctest::Approx(-0.99995796824145706).epsilon(1e-8));
  CHECK(sec7_drift_backward(0, 0.5, 1, 1) == doctest::Approx(0.57632865777921785).epsilon(1e-8));
  CHECK(sec7_drift_backward(0, -1, 1, 1) == doctest::Approx(-0.55955380951458593).epsilon(1e-8));
  const auto r = sec7_drift_forward_routes(0, 0.7, 1, 1);
  CHECK(r.under_integral == doctest::Approx(r.finite_difference).epsilon(1e-6));
}

TEST_CASE("times outside the window are rejected") {
  CHECK_THROWS_AS(sec7_eta_forward(0.6, 1, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(sec7_eta_backward(-0.7, 1, 1, 1), InvalidArgument);
}
