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

#include "bernstein/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bernstein/errors.hpp"

namespace bernstein {

const char* to_string(Orientation o) {
  return o == Orientation::kForward ? "forward" : "backward";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "forward") return Orientation::kForward;
  if (s == "backward") return Orientation::kBackward;
  throw InvalidArgument("orientation must be 'forward' or 'backward', got '" + s + "'");
}

void validate(const ProblemSpec& spec, const SpecValidation& opts) {
  if (!(spec.hbar > 0.0) || !std::isfinite(spec.hbar)) throw InvalidArgument("hbar must be positive");
  if (!(spec.half_horizon > 0.0) || !std::isfinite(spec.half_horizon))
    throw InvalidArgument("half_horizon must be positive");
  if (!std::isfinite(spec.x_min) || !std::isfinite(spec.x_max))
    throw InvalidArgument("spatial bounds must be finite");
  if (!(spec.x_min < spec.x_max)) throw InvalidArgument("x_min must be below x_max");

  const std::size_t m = std::max<std::size_t>(opts.lipschitz_samples, 2);
  const double h = (spec.x_max - spec.x_min) / static_cast<double>(m - 1);
  // Finite samples on the compact window also give V its lower bound there.
  for (std::size_t k = 0; k < m; ++k) {
    double x = spec.x_min + h * static_cast<double>(k);
    double v = spec.potential(x), s = spec.terminal_cost(x), s_star = spec.initial_cost(x);
    if (!std::isfinite(v) || !std::isfinite(s) || !std::isfinite(s_star))
      throw InvalidArgument("V, S and S* must be finite on [x_min, x_max]; failed at x = " +
                            std::to_string(x));
  }

  struct Named {
    const char* name;
    const ScalarFunction* f;
  };
  for (auto [name, f] : {Named{"potential", &spec.potential}, Named{"terminal_cost", &spec.terminal_cost},
                         Named{"initial_cost", &spec.initial_cost}}) {
    auto rep = sampled_lipschitz(*f, spec.x_min, spec.x_max, m, opts.lipschitz_bound);
    if (!rep.within_bound)
      throw InvalidArgument(std::string(name) + " exceeds the Lipschitz bound (sampled quotient " +
                            std::to_string(rep.max_quotient) + ")");
  }
}

namespace {

double require_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("problem spec: missing field '") + key + "'");
  if (!j.at(key).is_number())
    throw InvalidArgument(std::string("problem spec: field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

ProblemSpec problem_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("problem spec must be a JSON object");
  ProblemSpec spec;
  spec.hbar = require_number(j, "hbar");
  spec.half_horizon = require_number(j, "half_horizon");
  spec.x_min = require_number(j, "x_min");
  spec.x_max = require_number(j, "x_max");
  for (auto [key, target] : {std::pair{"potential", &spec.potential},
                             std::pair{"terminal_cost", &spec.terminal_cost},
                             std::pair{"initial_cost", &spec.initial_cost}}) {
    if (!j.contains(key)) throw InvalidArgument(std::string("problem spec: missing field '") + key + "'");
    try {
      *target = function_from_json(j.at(key));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("problem spec: field '") + key + "': " + e.what());
    }
  }
  validate(spec);
  return spec;
}

nlohmann::json to_json(const ProblemSpec& spec) {
  return {{"hbar", spec.hbar},
          {"half_horizon", spec.half_horizon},
          {"x_min", spec.x_min},
          {"x_max", spec.x_max},
          {"potential", to_json(spec.potential)},
          {"terminal_cost", to_json(spec.terminal_cost)},
          {"initial_cost", to_json(spec.initial_cost)}};
}

ProblemSpec sec7_spec(double hbar, double horizon, double half_width) {
  ProblemSpec spec;
  spec.hbar = hbar;
  spec.half_horizon = horizon / 2.0;
  spec.x_min = -half_width;
  spec.x_max = half_width;
  spec.potential = make_function("zero");
  spec.terminal_cost = make_function("abs");
  spec.initial_cost = make_function("log1p_abs");
  return spec;
}

// --- SpaceTimeGrid ----------------------------------------------------------

namespace {

std::vector<double> uniform_nodes(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) v[k] = a + h * static_cast<double>(k);
  v.front() = a;
  v.back() = b;
  return v;
}

}  // namespace

SpaceTimeGrid::SpaceTimeGrid(double x_min, double x_max, std::size_t nx, double t_begin,
                             double t_end, std::size_t nt) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(t_begin) ||
      !std::isfinite(t_end))
    throw InvalidArgument("grid bounds must be finite");
  if (!(x_min < x_max)) throw InvalidArgument("grid: x_min must be below x_max");
  if (!(t_begin < t_end)) throw InvalidArgument("grid: t_begin must be below t_end");
  if (nx < 3) throw InvalidArgument("grid: nx must be at least 3");
  if (nt < 2) throw InvalidArgument("grid: nt must be at least 2");
  xs_ = uniform_nodes(x_min, x_max, nx);
  ts_ = uniform_nodes(t_begin, t_end, nt);
  dx_ = (x_max - x_min) / static_cast<double>(nx - 1);
  dt_ = (t_end - t_begin) / static_cast<double>(nt - 1);
}

std::size_t SpaceTimeGrid::nearest_x(double x) const {
  double k = std::round((x - xs_.front()) / dx_);
  k = std::clamp(k, 0.0, static_cast<double>(nx() - 1));
  return static_cast<std::size_t>(k);
}

std::size_t SpaceTimeGrid::nearest_t(double t) const {
  double k = std::round((t - ts_.front()) / dt_);
  k = std::clamp(k, 0.0, static_cast<double>(nt() - 1));
  return static_cast<std::size_t>(k);
}

bool SpaceTimeGrid::contains(double t, double x, double slack) const {
  return t >= ts_.front() - slack && t <= ts_.back() + slack && x >= xs_.front() - slack &&
         x <= xs_.back() + slack;
}

bool operator==(const SpaceTimeGrid& a, const SpaceTimeGrid& b) {
  return a.xs_ == b.xs_ && a.ts_ == b.ts_;
}

GridPtr build_grid(const ProblemSpec& spec, std::size_t nx, std::size_t nt) {
  return build_grid(spec.x_min, spec.x_max, nx, spec.t_begin(), spec.t_end(), nt);
}

GridPtr build_grid(double x_min, double x_max, std::size_t nx, double t_begin, double t_end,
                   std::size_t nt) {
  return std::make_shared<const SpaceTimeGrid>(x_min, x_max, nx, t_begin, t_end, nt);
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  return a == b || (a && b && *a == *b);
}

// --- ScalarField -----------------------------------------------------------

ScalarField::ScalarField(GridPtr grid, double fill) : grid_(std::move(grid)) {
  if (!grid_) throw InvalidArgument("ScalarField: null grid");
  values_ = RowMatrix::Constant(Eigen::Index(grid_->nt()), Eigen::Index(grid_->nx()), fill);
}

ScalarField::ScalarField(GridPtr grid, RowMatrix values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("ScalarField: null grid");
  if (values_.rows() != Eigen::Index(grid_->nt()) || values_.cols() != Eigen::Index(grid_->nx()))
    throw InvalidArgument("ScalarField: value matrix shape does not match the grid");
  if (!all_finite()) throw NumericalError("ScalarField: non-finite entry");
}

bool ScalarField::all_finite() const { return values_.allFinite(); }

namespace {

constexpr double kHullSlack = 1e-12;

// Locates x in the uniform node array; returns cell index k and weight w so
// that x = (1 - w) * nodes[k] + w * nodes[k + 1].
std::pair<std::size_t, double> locate(const std::vector<double>& nodes, double h, double x) {
  const std::size_t n = nodes.size();
  double s = (x - nodes.front()) / h;
  s = std::clamp(s, 0.0, static_cast<double>(n - 1));
  auto k = static_cast<std::size_t>(std::floor(s));
  if (k >= n - 1) k = n - 2;
  return {k, s - static_cast<double>(k)};
}

}  // namespace

double interpolate(const ScalarField& field, double t, double x) {
  const auto& g = field.grid();
  const double slack = kHullSlack * std::max({1.0, std::abs(t), std::abs(x)});
  if (!g.contains(t, x, slack))
    throw DomainError("interpolate: (t = " + std::to_string(t) + ", x = " + std::to_string(x) +
                          ") lies outside the grid hull",
                      t, x);
  auto [n, wt] = locate(g.ts(), g.dt(), t);
  auto [i, wx] = locate(g.xs(), g.dx(), x);
  const double f00 = field(n, i), f01 = field(n, i + 1);
  const double f10 = field(n + 1, i), f11 = field(n + 1, i + 1);
  return (1 - wt) * ((1 - wx) * f00 + wx * f01) + wt * ((1 - wx) * f10 + wx * f11);
}

double interpolate_row(const ScalarField& field, std::size_t n, double x) {
  const auto& g = field.grid();
  const double slack = kHullSlack * std::max(1.0, std::abs(x));
  if (x < g.xs().front() - slack || x > g.xs().back() + slack)
    throw DomainError("interpolate_row: x = " + std::to_string(x) + " lies outside the grid", g.t(n), x);
  auto [i, wx] = locate(g.xs(), g.dx(), x);
  return (1 - wx) * field(n, i) + wx * field(n, i + 1);
}

ScalarField gradient_x(const ScalarField& field) {
  const auto& g = field.grid();
  const std::size_t nx = g.nx();
  if (nx < 3) throw InvalidArgument("gradient_x: need at least 3 nodes");
  ScalarField out(field.grid_ptr());
  const double inv2h = 1.0 / (2.0 * g.dx());
  for (std::size_t n = 0; n < g.nt(); ++n) {
    auto f = field.row(n);
    auto d = out.row(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
    for (std::size_t i = 1; i + 1 < nx; ++i) d[i] = (f[i + 1] - f[i - 1]) * inv2h;
    d[nx - 1] = (3.0 * f[nx - 1] - 4.0 * f[nx - 2] + f[nx - 3]) * inv2h;
  }
  return out;
}

ScalarField log_field(const ScalarField& field) {
  if ((field.values().array() <= 0.0).any()) throw NumericalError("log_field: nonpositive entry");
  return ScalarField(field.grid_ptr(), field.values().array().log().matrix());
}

// --- RegionMask ------------------------------------------------------------

RegionMask::RegionMask(GridPtr grid, Region fill) : grid_(std::move(grid)) {
  if (!grid_) throw InvalidArgument("RegionMask: null grid");
  flags_.assign(grid_->nt() * grid_->nx(), fill);
}

std::size_t RegionMask::count(Region r) const {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), r));
}

std::size_t RegionMask::count_row(std::size_t n, Region r) const {
  auto first = flags_.begin() + static_cast<std::ptrdiff_t>(n * grid_->nx());
  return static_cast<std::size_t>(std::count(first, first + static_cast<std::ptrdiff_t>(grid_->nx()), r));
}

std::vector<std::pair<double, double>> RegionMask::stopping_intervals(std::size_t n) const {
  std::vector<std::pair<double, double>> out;
  const std::size_t nx = grid_->nx();
  std::size_t i = 0;
  while (i < nx) {
    if (!stopping(n, i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < nx && stopping(n, j + 1)) ++j;
    out.emplace_back(grid_->x(i), grid_->x(j));
    i = j + 1;
  }
  return out;
}

std::vector<double> RegionMask::free_boundary(std::size_t n) const {
  std::vector<double> out;
  const std::size_t nx = grid_->nx();
  for (std::size_t i = 0; i < nx; ++i) {
    if (!stopping(n, i)) continue;
    bool left = i > 0 && !stopping(n, i - 1);
    bool right = i + 1 < nx && !stopping(n, i + 1);
    if (left || right) out.push_back(grid_->x(i));
  }
  return out;
}

RegionMask region_from_eta(const ScalarField& eta, const ScalarField& obstacle,
                           RegionTolerance tol, Orientation orientation) {
  if (!same_grid(eta.grid_ptr(), obstacle.grid_ptr()))
    throw InvalidArgument("region_from_eta: fields live on different grids");
  if (tol.abs_tol < 0.0 || tol.rel_tol < 0.0)
    throw InvalidArgument("region_from_eta: tolerances must be nonnegative");
  const auto& g = eta.grid();
  RegionMask mask(eta.grid_ptr());
  const std::size_t boundary_row = orientation == Orientation::kForward ? g.nt() - 1 : 0;
  for (std::size_t n = 0; n < g.nt(); ++n) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double ob = obstacle(n, i);
      if (!(ob > 0.0)) throw InvalidArgument("region_from_eta: obstacle must be positive");
      const double threshold = std::max(tol.abs_tol, tol.rel_tol * ob);
      bool stop = n == boundary_row || eta(n, i) - ob <= threshold;
      mask.set(n, i, stop ? Region::kStopping : Region::kContinuation);
    }
  }
  return mask;
}

RegionMask region_from_eta(const ScalarField& eta, const ScalarField& obstacle, double tol,
                           Orientation orientation) {
  if (tol < 0.0) throw InvalidArgument("region_from_eta: tol must be nonnegative");
  return region_from_eta(eta, obstacle, RegionTolerance{0.0, tol}, orientation);
}

void solve_tridiagonal(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                       std::span<const double> d, std::span<double> x) {
  const std::size_t n = d.size();
  if (a.size() != n || b.size() != n || c.size() != n || x.size() != n || n == 0)
    throw InvalidArgument("solve_tridiagonal: inconsistent sizes");
  std::vector<double> cp(n), dp(n);
  cp[0] = c[0] / b[0];
  dp[0] = d[0] / b[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = b[i] - a[i] * cp[i - 1];
    if (m == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
    cp[i] = c[i] / m;
    dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
  }
  x[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
}

double trapezoid(std::span<const double> values, double dx) {
  if (values.empty()) return 0.0;
  if (values.size() == 1) return values[0] * dx;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * dx;
}

}  // namespace bernstein
