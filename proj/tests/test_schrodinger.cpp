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
#include "bernstein/schrodinger.hpp"

using namespace bernstein;
using namespace bernstein::schrodinger;

namespace {

struct Case {
  GridPtr grid = build_grid(-5.0, 5.0, 201, -0.5, 0.5, 51);
  MarginalPair m = make_marginals(gaussian_density(*grid, -1.0, 0.5), gaussian_density(*grid, 1.0, 0.5), grid->dx());
};

}  // namespace

TEST_CASE("marginals are renormalised and truncation is reported") {
  const Case c;
  double a = 0.0;
  for (std::size_t i = 0; i < c.m.p_init.size(); ++i) a += c.m.p_init[i] * c.grid->dx();
  CHECK(a == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(c.m.truncation_init < 1e-6);
  std::vector<double> neg(c.m.p_init);
  neg[3] = -1.0;
  CHECK_THROWS_AS(make_marginals(neg, c.m.p_final, c.grid->dx()), InvalidArgument);
}

TEST_CASE("kernel matrix rows are heat-kernel weights") {
  const Case c;
  const auto K = kernel_matrix(*c.grid, 1.0, -0.5, 0.5);
  CHECK(K.rows() == 201);
  CHECK(K(100, 120) == doctest::Approx(analytic::heat_kernel(-0.5, 0.0, 0.5, 1.0, {1.0}) * c.grid->dx()).epsilon(1e-12));
}

TEST_CASE("Sinkhorn matches both marginals, linear and log domains agree") {
  const Case c;
  const auto K = kernel_matrix(*c.grid, 1.0, -0.5, 0.5);
  SinkhornOptions o;
  o.domain = SinkhornOptions::Domain::kLinear;
  const auto f = sinkhorn_solve(c.m, K, o);
  CHECK(f.final_marginal_error <= 1e-8);
  CHECK(f.iterations <= 500);
  CHECK(f.residual_trace.size() == std::size_t(f.iterations));
  const auto [pi, pf] = recompose_marginals(f, K);
  for (std::size_t i = 0; i < pi.size(); i += 10) {
    CHECK(pi[i] == doctest::Approx(c.m.p_init[i]).epsilon(1e-6));
    CHECK(pf[i] == doctest::Approx(c.m.p_final[i]).epsilon(1e-6));
  }
  Eigen::MatrixXd logK = K.array().log().matrix();
  const auto g = sinkhorn_solve_log(c.m, logK, o);
  CHECK(g.log_domain);
  CHECK(g.final_marginal_error <= 1e-8);
  CHECK(g.eta_final[120] == doctest::Approx(f.eta_final[120]).epsilon(1e-6));
}

TEST_CASE("Sinkhorn reports non-convergence with its residual trace") {
  const Case c;
  SinkhornOptions o;
  o.max_iter = 1;
  o.tol = 1e-14;
  try {
    sinkhorn_solve(c.m, kernel_matrix(*c.grid, 1.0, -0.5, 0.5), o);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.trace().size() == 1);
  }
}

TEST_CASE("full pipeline: mass of rho per slice and gauge invariance") {
  const Case c;
  const auto sol = solve_schrodinger(c.m, c.grid, 1.0);
  for (double mass : slice_masses(sol.rho)) CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  const auto scaled = rescale_gauge(sol.factors, 3.7);
  const auto rho2 = bernstein_density(propagate_eta(scaled, c.grid, 1.0), propagate_eta_star(scaled, c.grid, 1.0));
  CHECK((rho2.values() - sol.rho.values()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(rescale_gauge(sol.factors, 0.0), InvalidArgument);
}

TEST_CASE("Gaussian marginals give a Gaussian bridge: mean moves linearly") {
  const Case c;
  const auto sol = solve_schrodinger(c.m, c.grid, 1.0);
  const std::size_t mid = c.grid->nt() / 2;
  double mean = 0.0;
  for (std::size_t i = 0; i < c.grid->nx(); ++i) mean += c.grid->x(i) * sol.rho(mid, i) * c.grid->dx();
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("kernel-differentiated drift agrees with the log-gradient of eta") {
  const Case c;
  const auto sol = solve_schrodinger(c.m, c.grid, 1.0);
  const auto b = drift_from_factors(sol.factors, c.grid, 1.0);
  const auto g = gradient_x(log_field(sol.eta));
  const std::size_t n = 10;
  for (std::size_t i = 80; i <= 120; i += 10) CHECK(b(n, i) == doctest::Approx(g(n, i)).epsilon(1e-3));
}
