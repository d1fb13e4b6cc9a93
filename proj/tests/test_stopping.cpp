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
#include "bernstein/stopping.hpp"

using namespace bernstein;
using namespace bernstein::stopping;

namespace {

// Brownian motion absorbed at x = 0 with a STOPPING boundary row.
struct Barrier {
  ProblemSpec spec = [] {
    ProblemSpec s = sec7_spec();
    s.half_horizon = 0.6;
    s.x_min = -4.0;
    s.x_max = 4.0;
    return s;
  }();
  GridPtr grid = build_grid(spec, 321, 241);
  ScalarField drift{grid, 0.0};
  RegionMask mask{grid};
  Barrier() {
    const std::size_t z = grid->nearest_x(0.0);
    for (std::size_t n = 0; n < grid->nt(); ++n) mask.set(n, z, Region::kStopping);
    for (std::size_t i = 0; i < grid->nx(); ++i) mask.set(grid->nt() - 1, i, Region::kStopping);
  }
};

}  // namespace

TEST_CASE("continuation extent and classification") {
  const Barrier b;
  const auto ext = continuation_extent(b.mask, Orientation::kForward);
  CHECK(ext[10] == doctest::Approx(0.6));  // continuation right up to the boundary row
  CHECK(ext[b.grid->nearest_x(0.0)] == doctest::Approx(-0.6));
  const std::size_t row = b.grid->nearest_t(0.5);
  CHECK(classify_lemma3(row, 10, 0.4, b.mask, Orientation::kForward) == Lemma3Class::kOne);
  CHECK(classify_lemma3(0, 10, 0.4, b.mask, Orientation::kForward) == Lemma3Class::kPde);
  CHECK(classify_lemma3(0, b.grid->nearest_x(0.0), 0.4, b.mask, Orientation::kForward) == Lemma3Class::kZero);
  CHECK(std::string(to_string(Lemma3Class::kPde)) == "pde");
}

TEST_CASE("driftless barrier: q(-0.6, 1) = erf(1/sqrt 2) over unit time") {
  const Barrier b;
  const auto q = solve_q({Orientation::kForward, 0.4, &b.drift, &b.mask, 1.0});
  CHECK(q.evaluate(-0.6, 1.0) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(3e-3));
  CHECK(q.evaluate(-0.6, -1.0) == doctest::Approx(q.evaluate(-0.6, 1.0)).epsilon(1e-9));
  CHECK(q.evaluate(0.5, 1.0) == 1.0);
  CHECK(q.evaluate(0.0, 0.0) == 0.0);
  CHECK(q.q.values().maxCoeff() <= 1.0 + 1e-9);
  CHECK(q.q.values().minCoeff() >= -1e-9);
  CHECK(q.evaluate(-0.6, 50.0) == q.evaluate(-0.6, 4.0));  // clamped beyond the truncation
  CHECK_THROWS_AS(q.evaluate(0.7, 1.0), DomainError);
  CHECK_THROWS_AS(solve_q({Orientation::kForward, 0.6, &b.drift, &b.mask, 1.0}), InvalidArgument);
}

TEST_CASE("Monte Carlo survival and martingale property match the PDE") {
  const Barrier b;
  const auto q = solve_q({Orientation::kForward, 0.4, &b.drift, &b.mask, 1.0});
  simulate::SimConfig c;
  c.dt = b.grid->dt();
  c.n_paths = 20000;
  c.seed = 11;
  c.t0 = -0.6;
  c.x0 = 0.7;
  c.t_final = 0.4;
  c.checkpoints = {-0.2, 0.0, 0.2};
  const auto e = simulate::simulate_forward(b.spec, b.drift, b.mask, c);
  const auto s = empirical_survival(e, 0.4);
  CHECK(std::abs(s.estimate - q.evaluate(-0.6, 0.7)) < 4 * s.stderr_);
  const auto m = martingale_check(q, e, 4.0);
  CHECK(m.pass);
  CHECK(m.checkpoints.size() == 3);
  CHECK(to_json(m)["checkpoints"].size() == 3);
}

TEST_CASE("backward survival mirrors the forward problem in time") {
  const Barrier b;
  RegionMask mb(b.grid);
  const std::size_t z = b.grid->nearest_x(0.0);
  for (std::size_t n = 0; n < b.grid->nt(); ++n) mb.set(n, z, Region::kStopping);
  for (std::size_t i = 0; i < b.grid->nx(); ++i) mb.set(0, i, Region::kStopping);
  const auto fwd = solve_q({Orientation::kForward, 0.4, &b.drift, &b.mask, 1.0});
  const auto bwd = solve_q({Orientation::kBackward, -0.4, &b.drift, &mb, 1.0});
  // q*(t, x) = P(last exit before -0.4) mirrors q(-t, x) for a driftless path.
  CHECK(bwd.evaluate(0.6, 1.0) == doctest::Approx(fwd.evaluate(-0.6, 1.0)).epsilon(1e-9));
  CHECK(bwd.evaluate(-0.5, 1.0) == 1.0);
}
