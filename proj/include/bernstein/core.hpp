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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "bernstein/functions.hpp"

namespace bernstein {

/// Time orientation of a control problem. Forward problems carry a terminal
/// cost at +T/2 and march down in time; backward problems carry an initial
/// cost at -T/2 and march up.
enum class Orientation { kForward, kBackward };

const char* to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

/// One-dimensional problem data on the horizon [-T/2, T/2].
struct ProblemSpec {
  double hbar = 1.0;
  double half_horizon = 0.5;
  double x_min = -3.0;
  double x_max = 3.0;
  ScalarFunction potential;
  ScalarFunction terminal_cost;
  ScalarFunction initial_cost;

  double t_begin() const { return -half_horizon; }
  double t_end() const { return half_horizon; }

  /// Cost paid on stopping for the given orientation (S or S*).
  const ScalarFunction& stopping_cost(Orientation o) const {
    return o == Orientation::kForward ? terminal_cost : initial_cost;
  }
};

struct SpecValidation {
  std::size_t lipschitz_samples = 2001;
  double lipschitz_bound = 1e6;
};

/// Throws InvalidArgument on a violated invariant: hbar > 0, T/2 > 0,
/// x_min < x_max, finite costs, V bounded below, sampled Lipschitz bound.
void validate(const ProblemSpec& spec, const SpecValidation& opts = {});

ProblemSpec problem_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProblemSpec& spec);

/// V = 0, S = |x|, S* = log(1 + |x|): the worked one-dimensional example.
ProblemSpec sec7_spec(double hbar = 1.0, double horizon = 1.0, double half_width = 3.0);

/// Uniform tensor grid over [x_min, x_max] x [t_begin, t_end].
class SpaceTimeGrid {
 public:
  SpaceTimeGrid(double x_min, double x_max, std::size_t nx, double t_begin, double t_end,
                std::size_t nt);

  std::size_t nx() const noexcept { return xs_.size(); }
  std::size_t nt() const noexcept { return ts_.size(); }
  double dx() const noexcept { return dx_; }
  double dt() const noexcept { return dt_; }
  const std::vector<double>& xs() const noexcept { return xs_; }
  const std::vector<double>& ts() const noexcept { return ts_; }
  double x(std::size_t i) const { return xs_[i]; }
  double t(std::size_t n) const { return ts_[n]; }

  /// Index of the node nearest to x (clamped to the grid).
  std::size_t nearest_x(double x) const;
  std::size_t nearest_t(double t) const;

  bool contains(double t, double x, double slack = 0.0) const;

  friend bool operator==(const SpaceTimeGrid& a, const SpaceTimeGrid& b);

 private:
  std::vector<double> xs_;
  std::vector<double> ts_;
  double dx_;
  double dt_;
};

using GridPtr = std::shared_ptr<const SpaceTimeGrid>;

GridPtr build_grid(const ProblemSpec& spec, std::size_t nx, std::size_t nt);
GridPtr build_grid(double x_min, double x_max, std::size_t nx, double t_begin, double t_end,
                   std::size_t nt);

bool same_grid(const GridPtr& a, const GridPtr& b);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Values on a SpaceTimeGrid, indexed (time, space).
class ScalarField {
 public:
  ScalarField(GridPtr grid, double fill = 0.0);
  /// Throws if the shape disagrees with the grid or an entry is not finite.
  ScalarField(GridPtr grid, RowMatrix values);

  template <class F>
  static ScalarField from_function(GridPtr grid, F&& f) {
    ScalarField out(grid);
    for (std::size_t n = 0; n < grid->nt(); ++n)
      for (std::size_t i = 0; i < grid->nx(); ++i) out(n, i) = f(grid->t(n), grid->x(i));
    return out;
  }

  const SpaceTimeGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const RowMatrix& values() const noexcept { return values_; }
  RowMatrix& values() noexcept { return values_; }

  double& operator()(std::size_t n, std::size_t i) { return values_(Eigen::Index(n), Eigen::Index(i)); }
  double operator()(std::size_t n, std::size_t i) const {
    return values_(Eigen::Index(n), Eigen::Index(i));
  }

  std::span<double> row(std::size_t n) {
    return {values_.data() + n * grid_->nx(), grid_->nx()};
  }
  std::span<const double> row(std::size_t n) const {
    return {values_.data() + n * grid_->nx(), grid_->nx()};
  }

  bool all_finite() const;

 private:
  GridPtr grid_;
  RowMatrix values_;
};

/// Bilinear interpolation in (t, x). Throws DomainError outside the grid hull.
double interpolate(const ScalarField& field, double t, double x);

/// Linear interpolation of one time row at position x (hull-checked).
double interpolate_row(const ScalarField& field, std::size_t n, double x);

/// d/dx with central differences inside and second-order one-sided stencils
/// at the two edges; exact on quadratics.
ScalarField gradient_x(const ScalarField& field);

ScalarField log_field(const ScalarField& field);

enum class Region : std::uint8_t { kContinuation = 0, kStopping = 1 };

/// Per-node classification into continuation and stopping sets.
class RegionMask {
 public:
  explicit RegionMask(GridPtr grid, Region fill = Region::kContinuation);

  const SpaceTimeGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }

  Region operator()(std::size_t n, std::size_t i) const { return flags_[n * grid_->nx() + i]; }
  void set(std::size_t n, std::size_t i, Region r) { flags_[n * grid_->nx() + i] = r; }
  bool stopping(std::size_t n, std::size_t i) const { return (*this)(n, i) == Region::kStopping; }

  std::size_t count(Region r) const;
  std::size_t count_row(std::size_t n, Region r) const;

  /// Maximal runs of STOPPING nodes in row n as closed intervals [x_a, x_b]
  /// (a point barrier has x_a == x_b).
  std::vector<std::pair<double, double>> stopping_intervals(std::size_t n) const;

  /// STOPPING nodes of row n adjacent to a CONTINUATION node.
  std::vector<double> free_boundary(std::size_t n) const;

  friend bool operator==(const RegionMask& a, const RegionMask& b) {
    return *a.grid_ == *b.grid_ && a.flags_ == b.flags_;
  }

 private:
  GridPtr grid_;
  std::vector<Region> flags_;
};

struct RegionTolerance {
  double abs_tol = 0.0;
  double rel_tol = 0.0;
};

/// A node is STOPPING iff eta - obstacle <= max(abs_tol, rel_tol * obstacle).
/// The boundary row of the given orientation (t = T/2 forward, t = -T/2
/// backward) is STOPPING unconditionally.
RegionMask region_from_eta(const ScalarField& eta, const ScalarField& obstacle,
                           RegionTolerance tol, Orientation orientation = Orientation::kForward);

/// Single relative tolerance: STOPPING iff eta <= obstacle * (1 + tol).
RegionMask region_from_eta(const ScalarField& eta, const ScalarField& obstacle, double tol,
                           Orientation orientation = Orientation::kForward);

/// Thomas algorithm for a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i (a_0 and
/// c_{n-1} ignored). No pivoting: intended for diagonally dominant systems.
void solve_tridiagonal(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                       std::span<const double> d, std::span<double> x);

/// Trapezoid-rule integral of one sampled slice.
double trapezoid(std::span<const double> values, double dx);

}  // namespace bernstein
