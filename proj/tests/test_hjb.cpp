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
#include "bernstein/hjb.hpp"

using namespace bernstein;
using namespace bernstein::hjb;

namespace {

const ProblemSpec kSpec = sec7_spec();

double oracle_u(Orientation o, double t, double x) {
  return -std::log(o == Orientation::kForward ? analytic::sec7_eta_forward(t, x, 1, 1)
                                              : analytic::sec7_eta_backward(t, x, 1, 1));
}

double max_error(const ValueSolution& v, Orientation o, std::size_t stride) {
  const auto& g = v.value.grid();
  double e = 0.0;
  for (std::size_t n = 0; n < g.nt(); n += stride)
    for (std::size_t i = 0; i < g.nx(); i += stride)
      if (std::abs(g.x(i)) >= 0.1 - 1e-12) e = std::max(e, std::abs(v.value(n, i) - oracle_u(o, g.t(n), g.x(i))));
  return e;
}

}  // namespace

TEST_CASE("solver config JSON") {
  const auto c = solver_config_from_json({{"psor_tol", 1e-9}, {"far_field", "obstacle"}, {"far_field_padding", 0}});
  CHECK(c.psor_tol == 1e-9);
  CHECK(c.far_field == FarField::kObstacle);
  CHECK(solver_config_from_json(to_json(c)).far_field_padding == 0.0);
  CHECK_THROWS_AS(solver_config_from_json({{"psor_tolerance", 1e-9}}), InvalidArgument);
  CHECK_THROWS_AS(solver_config_from_json({{"psor_omega", 2.5}}), InvalidArgument);
  SolverConfig auto_pad;
  CHECK(padding_nodes(auto_pad, kSpec, 0.01) == std::size_t(std::ceil(6.0 * std::sqrt(1.0) / 0.01)));
}

TEST_CASE("obstacle field is exp(-S/hbar) for the orientation") {
  const auto g = build_grid(kSpec, 61, 11);
  const auto f = obstacle_field(kSpec, g, Orientation::kForward);
  const auto b = obstacle_field(kSpec, g, Orientation::kBackward);
  CHECK(f(3, 50) == doctest::Approx(std::exp(-g->x(50))));
  CHECK(b(3, 50) == doctest::Approx(1.0 / (1.0 + g->x(50))));
}

TEST_CASE("forward solve: oracle agreement, free boundary and complementarity") {
  const auto g = build_grid(kSpec, 121, 201);
  const auto sol = solve_forward_obstacle(kSpec, g);
  CHECK(sol.orientation == Orientation::kForward);
  CHECK(sol.pad_nodes > 0);
  CHECK((sol.eta.values() - sol.obstacle.values()).minCoeff() >= -1e-12);
  const auto v = value_from_eta(sol, kSpec.hbar);
  CHECK(max_error(v, Orientation::kForward, 1) < 5e-3);
  const std::size_t zero = g->nearest_x(0.0);
  for (std::size_t n = 0; n < g->nt(); ++n)
    for (std::size_t i = 0; i < g->nx(); ++i) REQUIRE(sol.mask.stopping(n, i) == (n == g->nt() - 1 || i == zero));
  CHECK(lcp_residual_norm(sol, kSpec) <= 10 * sol.config.psor_tol);
  // The optimal drift pushes towards the barrier.
  CHECK(v.drift(50, g->nearest_x(1.0)) < 0.0);
  CHECK(v.drift(50, g->nearest_x(-1.0)) > 0.0);
  CHECK(v.drift(100, g->nearest_x(1.0)) == doctest::Approx(-0.91472194435267683).epsilon(2e-2));
}

TEST_CASE("backward solve mirrors the forward one") {
  const auto g = build_grid(kSpec, 121, 201);
  const auto sol = solve_backward_obstacle(kSpec, g);
  const auto v = value_from_eta(sol, kSpec.hbar);
  CHECK(max_error(v, Orientation::kBackward, 1) < 5e-3);
  CHECK(sol.mask.count_row(0, Region::kStopping) == g->nx());
  CHECK(sol.mask.count(Region::kStopping) == g->nx() + g->nt() - 1);
  CHECK(lcp_residual_norm(sol, kSpec) <= 10 * sol.config.psor_tol);
  CHECK(v.drift(100, g->nearest_x(0.5)) == doctest::Approx(0.57632865777921785).epsilon(3e-2));
}

TEST_CASE("refinement reduces the oracle error at first order or better") {
  const auto e1 = max_error(value_from_eta(solve_forward_obstacle(kSpec, build_grid(kSpec, 61, 51)), 1.0),
                            Orientation::kForward, 1);
  const auto e2 = max_error(value_from_eta(solve_forward_obstacle(kSpec, build_grid(kSpec, 121, 201)), 1.0),
                            Orientation::kForward, 2);
  CHECK(std::log2(e1 / e2) >= 1.0);
}

TEST_CASE("literal Dirichlet far field is still available") {
  SolverConfig c;
  c.far_field = FarField::kObstacle;
  c.far_field_padding = 0;
  const auto g = build_grid(kSpec, 61, 51);
  const auto sol = solve_forward_obstacle(kSpec, g, c);
  CHECK(sol.pad_nodes == 0);
  CHECK(sol.eta(10, 0) == doctest::Approx(sol.obstacle(10, 0)));
  CHECK(sol.mask.stopping(10, 0));
}

TEST_CASE("classical solution dominates the stopping one") {
  const auto g = build_grid(kSpec, 121, 201);
  const auto u = value_from_eta(solve_forward_obstacle(kSpec, g), 1.0);
  const auto h = classical_value(kSpec, g, Orientation::kForward);
  CHECK((u.value.values() - h.value.values()).maxCoeff() <= 1e-6);
  CHECK(interpolate(h.value, 0.0, 1.0) == doctest::Approx(0.87163057371292877).epsilon(5e-3));
  CHECK(interpolate(h.value, 0.0, 1.0) - interpolate(u.value, 0.0, 1.0) > 0.05);
  CHECK(h.mask.count(Region::kStopping) == 0);
  const auto hs = classical_eta(kSpec, g, Orientation::kBackward);
  CHECK(interpolate(hs, 0.0, 0.0) == doctest::Approx(0.68282020679318929656).epsilon(5e-3));
}

TEST_CASE("PSOR non-convergence is reported") {
  SolverConfig c;
  c.psor_max_iter = 1;
  c.psor_tol = 1e-15;
  CHECK_THROWS_AS(solve_forward_obstacle(kSpec, build_grid(kSpec, 61, 11), c), ConvergenceError);
}
