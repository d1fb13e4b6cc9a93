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

#include "bernstein/core.hpp"
#include "bernstein/errors.hpp"

using namespace bernstein;

TEST_CASE("grid nodes are uniform and hit both ends exactly") {
  const auto g = build_grid(-3.0, 3.0, 601, -0.5, 0.5, 2001);
  CHECK(g->nx() == 601);
  CHECK(g->nt() == 2001);
  CHECK(g->x(0) == -3.0);
  CHECK(g->x(600) == 3.0);
  CHECK(g->t(2000) == 0.5);
  CHECK(g->dx() == doctest::Approx(0.01));
  CHECK(g->dt() == doctest::Approx(5e-4));
  CHECK(g->x(g->nearest_x(0.0)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g->nearest_x(-99.0) == 0);
  CHECK(g->nearest_t(99.0) == 2000);
}

TEST_CASE("grid rejects degenerate shapes") {
  CHECK_THROWS_AS(build_grid(1.0, -1.0, 11, 0.0, 1.0, 5), InvalidArgument);
  CHECK_THROWS_AS(build_grid(-1.0, 1.0, 2, 0.0, 1.0, 5), InvalidArgument);
  CHECK_THROWS_AS(build_grid(-1.0, 1.0, 11, 0.0, 1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(build_grid(-1.0, 1.0, 11, 1.0, 1.0, 5), InvalidArgument);
}

TEST_CASE("problem spec JSON round trip and validation") {
  const auto spec = sec7_spec();
  CHECK(spec.half_horizon == 0.5);
  CHECK(spec.terminal_cost(-2.0) == 2.0);
  CHECK(spec.initial_cost(1.0) == doctest::Approx(std::log(2.0)));
  const auto back = problem_spec_from_json(to_json(spec));
  CHECK(to_json(back) == to_json(spec));
  auto j = to_json(spec);
  j["hbar"] = -1.0;
  CHECK_THROWS_AS(problem_spec_from_json(j), InvalidArgument);
  j = to_json(spec);
  j.erase("potential");
  CHECK_THROWS_AS(problem_spec_from_json(j), InvalidArgument);
}

TEST_CASE("bilinear interpolation is exact on bilinear data and refuses the outside") {
  const auto g = build_grid(-1.0, 1.0, 21, 0.0, 1.0, 11);
  const auto f = ScalarField::from_function(g, [](double t, double x) { return 2.0 + 3.0 * x - t + 0.5 * t * x; });
  CHECK(interpolate(f, 0.33, 0.417) == doctest::Approx(2.0 + 3.0 * 0.417 - 0.33 + 0.5 * 0.33 * 0.417));
  CHECK(interpolate(f, 1.0, 1.0) == doctest::Approx(4.5));
  CHECK_THROWS_AS(interpolate(f, 1.1, 0.0), DomainError);
  CHECK_THROWS_AS(interpolate(f, 0.5, -1.01), DomainError);
}

TEST_CASE("gradient_x is second order, including the edges") {
  const auto g = build_grid(0.0, 1.0, 101, 0.0, 1.0, 2);
  const auto f = ScalarField::from_function(g, [](double, double x) { return x * x; });
  const auto d = gradient_x(f);
  for (std::size_t i = 0; i < g->nx(); ++i) CHECK(d(0, i) == doctest::Approx(2.0 * g->x(i)).epsilon(1e-10));
}

TEST_CASE("log_field rejects nonpositive values") {
  const auto g = build_grid(0.0, 1.0, 5, 0.0, 1.0, 2);
  ScalarField f(g, 1.0);
  CHECK(log_field(f).values().cwiseAbs().maxCoeff() == 0.0);
  f(1, 2) = 0.0;
  CHECK_THROWS_AS(log_field(f), NumericalError);
}

TEST_CASE("region from eta marks contact nodes and the boundary row") {
  const auto g = build_grid(-1.0, 1.0, 5, 0.0, 1.0, 3);
  ScalarField ob(g, 1.0), eta(g, 2.0);
  eta(0, 2) = 1.0 + 1e-10;  // within tolerance: contact
  eta(1, 0) = 1.0 + 1e-6;   // clearly above
  const auto m = region_from_eta(eta, ob, RegionTolerance{1e-9, 1e-8});
  CHECK(m.stopping(0, 2));
  CHECK_FALSE(m.stopping(1, 0));
  CHECK(m.count_row(2, Region::kStopping) == 5);
  CHECK(m.count(Region::kStopping) == 6);
  const auto iv = m.stopping_intervals(0);
  REQUIRE(iv.size() == 1);
  CHECK(iv[0].first == 0.0);
  CHECK(m.free_boundary(0) == std::vector<double>{0.0});
  const auto mb = region_from_eta(eta, ob, RegionTolerance{1e-9, 1e-8}, Orientation::kBackward);
  CHECK(mb.count_row(0, Region::kStopping) == 5);
}

TEST_CASE("tridiagonal solver matches a hand-solved system") {
  // [2 -1 0; -1 2 -1; 0 -1 2] x = [1 0 1] -> x = [1 1 1]
  std::vector<double> a{0, -1, -1}, b{2, 2, 2}, c{-1, -1, 0}, d{1, 0, 1}, x(3);
  solve_tridiagonal(a, b, c, d, x);
  for (double v : x) CHECK(v == doctest::Approx(1.0));
  std::vector<double> z{0, 0, 0};
  CHECK_THROWS(solve_tridiagonal(a, z, c, d, x));
}

TEST_CASE("trapezoid integrates linear data exactly") {
  std::vector<double> v{0.0, 1.0, 2.0, 3.0};
  CHECK(trapezoid(v, 0.5) == doctest::Approx(2.25));
}

TEST_CASE("orientation strings") {
  CHECK(std::string(to_string(Orientation::kForward)) == "forward");
  CHECK(orientation_from_string("backward") == Orientation::kBackward);
  CHECK_THROWS_AS(orientation_from_string("sideways"), InvalidArgument);
}
