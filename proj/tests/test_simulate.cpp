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

#include "bernstein/errors.hpp"
#include "bernstein/simulate.hpp"

using namespace bernstein;
using namespace bernstein::simulate;

namespace {

ProblemSpec free_spec() {
  ProblemSpec s = sec7_spec();
  s.x_min = -6.0;
  s.x_max = 6.0;
  return s;
}

}  // namespace

TEST_CASE("summaries: constant samples are exact, stderr is sd/sqrt(n)") {
  const auto c = summarize(std::vector<double>(1000, 0.1 + 0.2));
  CHECK(c.mean == 0.1 + 0.2);
  CHECK(c.stderr_ == 0.0);
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("sim config JSON round trip and validation") {
  SimConfig c;
  c.checkpoints = {-0.2, 0.1};
  c.t_final = 0.25;
  const auto back = sim_config_from_json(to_json(c));
  CHECK(back.checkpoints == c.checkpoints);
  CHECK(back.t_final == 0.25);
  CHECK_THROWS_AS(sim_config_from_json({{"dt", -1.0}}), InvalidArgument);
  CHECK_THROWS_AS(sim_config_from_json({{"paths", 10}}), InvalidArgument);
}

TEST_CASE("driftless forward paths without stopping: Brownian moments, reproducible") {
  const auto spec = free_spec();
  const auto g = build_grid(spec, 121, 101);
  const ScalarField zero(g, 0.0);
  const RegionMask never(g);  // only the boundary row would stop; leave it empty
  SimConfig c;
  c.dt = 0.01;
  c.n_paths = 20000;
  c.t0 = -0.5;
  c.x0 = 0.3;
  const auto e = simulate_forward(spec, zero, never, c);
  const auto x = e.stopped_state();
  CHECK(std::abs(x.mean - 0.3) < 4 * x.stderr_);
  double var = 0.0;
  for (const auto& p : e.paths) var += (p.stopped_state - x.mean) * (p.stopped_state - x.mean);
  var /= double(e.paths.size() - 1);
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
  CHECK(e.hit_fraction().mean == 0.0);
  const auto e2 = simulate_forward(spec, zero, never, c);
  CHECK(e2.paths[17].stopped_state == e.paths[17].stopped_state);
  // Terminal cost |x| from x0 = 0 under b = 0: E|W_1| = sqrt(2/pi).
  c.x0 = 0.0;
  const auto a = action_estimate(simulate_forward(spec, zero, never, c));
  CHECK(std::abs(a.mean - std::sqrt(2.0 / M_PI)) < 4 * a.stderr_);
}

TEST_CASE("constant drift shifts the mean and adds b^2/2 running cost") {
  const auto spec = free_spec();
  const auto g = build_grid(spec, 121, 101);
  const ScalarField drift(g, 0.8);
  const RegionMask never(g);
  SimConfig c;
  c.dt = 0.01;
  c.n_paths = 5000;
  c.x0 = -1.0;
  const auto e = simulate_forward(spec, drift, never, c);
  CHECK(std::abs(e.stopped_state().mean - (-1.0 + 0.8)) < 4 * e.stopped_state().stderr_);
  CHECK(e.paths[0].running_cost == doctest::Approx(0.5 * 0.64 * 1.0).epsilon(1e-9));
}

TEST_CASE("stopping at a barrier column and at the start") {
  const auto spec = free_spec();
  const auto g = build_grid(spec, 121, 101);
  const ScalarField zero(g, 0.0);
  RegionMask m(g);
  const std::size_t z = g->nearest_x(0.0);
  for (std::size_t n = 0; n < g->nt(); ++n) m.set(n, z, Region::kStopping);
  SimConfig c;
  c.dt = 0.01;
  c.n_paths = 4000;
  c.x0 = 1.0;
  const auto e = simulate_forward(spec, zero, m, c);
  for (const auto& p : e.paths)
    if (p.exit == Exit::kBoundary) REQUIRE(std::abs(p.stopped_state) < 1e-12);
  // P(hit 0 within unit time from 1) = 2 (1 - Phi(1)) = 0.3173.
  CHECK(std::abs(e.hit_fraction().mean - 0.31731) < 4 * e.hit_fraction().stderr_);
  c.x0 = 0.0;
  const auto s = simulate_forward(spec, zero, m, c);
  CHECK(s.start_in_stopping);
  CHECK(s.paths[0].exit == Exit::kStart);
  CHECK(s.paths[0].stop_time == c.t0);
}

TEST_CASE("backward paths run downward in time") {
  const auto spec = free_spec();
  const auto g = build_grid(spec, 121, 101);
  const ScalarField drift(g, -0.5);  // b* ; the time-flipped path moves by -b* per unit of elapsed time
  const RegionMask never(g);
  SimConfig c;
  c.dt = 0.01;
  c.n_paths = 5000;
  c.orientation = Orientation::kBackward;
  c.t0 = 0.5;
  c.x0 = 0.0;
  c.checkpoints = {0.0};
  const auto e = simulate_backward(spec, drift, never, c);
  CHECK(e.paths[0].stop_time == doctest::Approx(-0.5));
  CHECK(std::abs(e.stopped_state().mean - 0.5) < 4 * e.stopped_state().stderr_);
  REQUIRE(e.checkpoint_states.size() == 1);
}

TEST_CASE("simulation guards") {
  const auto spec = free_spec();
  const auto g = build_grid(spec, 121, 11);
  const ScalarField zero(g, 0.0);
  const RegionMask never(g);
  SimConfig c;
  c.dt = 0.5;
  CHECK_THROWS_AS(simulate_forward(spec, zero, never, c), InvalidArgument);
  c.dt = 0.01;
  c.t0 = 0.7;
  CHECK_THROWS_AS(simulate_forward(spec, zero, never, c), InvalidArgument);
}

TEST_CASE("reversed drift of a stationary Gaussian density") {
  // rho = N(0, 1/2) for all t and b = 0  =>  b* = -hbar d/dx log rho = 2x.
  const auto g = build_grid(-4.0, 4.0, 401, -0.5, 0.5, 3);
  const auto rho = ScalarField::from_function(g, [](double, double x) { return std::exp(-x * x) / std::sqrt(M_PI); });
  const ScalarField b(g, 0.0);
  const auto r = reversed_drift(b, rho, 1.0);
  CHECK(r.drift_star(1, 250) == doctest::Approx(2.0 * g->x(250)).epsilon(1e-3));
  CHECK(r.undefined_count == 0);
  const auto r2 = reversed_drift(b, rho, 1.0, 0.5);
  CHECK(r2.undefined_count > 0);
}

TEST_CASE("Fokker-Planck: exact mass, heat-equation variance growth") {
  ProblemSpec spec = free_spec();
  const auto g = build_grid(spec, 601, 201);
  const ScalarField zero(g, 0.0);
  std::vector<double> rho0(g->nx());
  for (std::size_t i = 0; i < g->nx(); ++i) rho0[i] = std::exp(-g->x(i) * g->x(i) / 0.5) / std::sqrt(0.5 * M_PI);
  const auto res = fokker_planck(spec, zero, rho0);
  for (double m : res.mass) CHECK(m == doctest::Approx(res.mass[0]).epsilon(1e-12));
  double var = 0.0;
  for (std::size_t i = 0; i < g->nx(); ++i) var += g->x(i) * g->x(i) * res.rho(g->nt() - 1, i) * g->dx();
  CHECK(var / res.mass.back() == doctest::Approx(0.25 + 1.0).epsilon(1e-2));
  CHECK(res.min_value >= 0.0);
}

TEST_CASE("bridge test: pinned Brownian midpoint") {
  BridgeTestConfig c;
  c.n_paths = 20000;
  c.n_bins = 20;
  c.span_sd = 3.0;
  c.seed = 5;
  const auto r = bridge_markov_test(c);
  CHECK(r.dof == 19);
  CHECK(r.expected_variance == doctest::Approx(0.25));
  CHECK(std::abs(r.mean) < 4 * r.mean_stderr);
  CHECK(r.p_value > 1e-4);
  CHECK(to_json(r)["observed"].size() == 20);
  c.t = 1.5;
  CHECK_THROWS_AS(bridge_markov_test(c), InvalidArgument);
}
