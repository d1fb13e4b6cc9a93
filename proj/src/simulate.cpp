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

#include "bernstein/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "bernstein/analytic.hpp"
#include "bernstein/errors.hpp"
#include "bernstein/rng.hpp"

namespace bernstein::simulate {

void validate(const SimConfig& c) {
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw InvalidArgument("sim: dt must be positive");
  if (c.n_paths < 1) throw InvalidArgument("sim: n_paths must be at least 1");
  if (!std::isfinite(c.t0) || !std::isfinite(c.x0)) throw InvalidArgument("sim: start must be finite");
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("sim config must be a JSON object");
  SimConfig c;
  for (const auto& [key, v] : j.items()) {
    auto number = [&]() {
      if (!v.is_number()) throw InvalidArgument("sim config: field '" + key + "' must be a number");
      return v.get<double>();
    };
    if (key == "dt") c.dt = number();
    else if (key == "n_paths") {
      if (!v.is_number_unsigned()) throw InvalidArgument("sim config: field 'n_paths' must be a positive integer");
      c.n_paths = v.get<std::size_t>();
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw InvalidArgument("sim config: field 'seed' must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "t0") c.t0 = number();
    else if (key == "x0") c.x0 = number();
    else if (key == "t_final") c.t_final = number();
    else if (key == "orientation") c.orientation = orientation_from_string(v.get<std::string>());
    else if (key == "bridge_correction") {
      if (!v.is_boolean()) throw InvalidArgument("sim config: field 'bridge_correction' must be a boolean");
      c.bridge_correction = v.get<bool>();
    } else if (key == "checkpoints") {
      if (!v.is_array()) throw InvalidArgument("sim config: field 'checkpoints' must be an array");
      c.checkpoints = v.get<std::vector<double>>();
    } else {
      throw InvalidArgument("sim config: unknown field '" + key + "'");
    }
  }
  validate(c);
  return c;
}

nlohmann::json to_json(const SimConfig& c) {
  nlohmann::json j{{"dt", c.dt},         {"n_paths", c.n_paths},
                   {"seed", c.seed},     {"t0", c.t0},
                   {"x0", c.x0},         {"orientation", to_string(c.orientation)},
                   {"bridge_correction", c.bridge_correction}, {"checkpoints", c.checkpoints}};
  j["t_final"] = std::isnan(c.t_final) ? nlohmann::json(nullptr) : nlohmann::json(c.t_final);
  return j;
}

Statistic summarize(const std::vector<double>& v) {
  Statistic s;
  s.n = v.size();
  if (v.empty()) return s;
  // Shifted accumulation keeps a constant sample exact.
  const double ref = v.front();
  double sum = 0.0;
  for (double x : v) sum += x - ref;
  s.mean = ref + sum / double(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / double(v.size() - 1) / double(v.size()));
  }
  return s;
}

nlohmann::json to_json(const Statistic& s) { return {{"mean", s.mean}, {"stderr", s.stderr_}, {"n", s.n}}; }

namespace {

template <class F>
Statistic collect(const std::vector<PathRecord>& paths, F f) {
  std::vector<double> v(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) v[i] = f(paths[i]);
  return summarize(v);
}

}  // namespace

Statistic PathEnsemble::stop_time() const { return collect(paths, [](const PathRecord& p) { return p.stop_time; }); }
Statistic PathEnsemble::stopped_state() const {
  return collect(paths, [](const PathRecord& p) { return p.stopped_state; });
}
Statistic PathEnsemble::action() const { return collect(paths, [](const PathRecord& p) { return p.action(); }); }
Statistic PathEnsemble::hit_fraction() const {
  return collect(paths, [](const PathRecord& p) { return p.hit() ? 1.0 : 0.0; });
}

nlohmann::json PathEnsemble::summary() const {
  return {{"config", to_json(config)},
          {"effective_dt", dt},
          {"steps", steps},
          {"left_hull", left_hull},
          {"start_in_stopping", start_in_stopping},
          {"stop_time", to_json(stop_time())},
          {"stopped_state", to_json(stopped_state())},
          {"action", to_json(action())},
          {"hit_fraction", to_json(hit_fraction())}};
}

namespace {

// Bilinear lookup with the position clamped into the hull.
class FieldLookup {
 public:
  explicit FieldLookup(const ScalarField& f) : f_(f), g_(f.grid()) {}

  double operator()(double t, double x, bool& clamped) const {
    const double x0 = g_.x(0), x1 = g_.x(g_.nx() - 1);
    if (x < x0 || x > x1) {
      clamped = true;
      x = std::clamp(x, x0, x1);
    }
    t = std::clamp(t, g_.t(0), g_.t(g_.nt() - 1));
    auto [n, a] = locate(t, g_.t(0), g_.dt(), g_.nt());
    auto [i, b] = locate(x, x0, g_.dx(), g_.nx());
    const double v00 = f_(n, i), v01 = f_(n, i + 1), v10 = f_(n + 1, i), v11 = f_(n + 1, i + 1);
    return (1 - a) * ((1 - b) * v00 + b * v01) + a * ((1 - b) * v10 + b * v11);
  }

 private:
  static std::pair<std::size_t, double> locate(double v, double origin, double h, std::size_t count) {
    double s = (v - origin) / h;
    auto k = static_cast<std::size_t>(std::floor(s));
    if (k >= count - 1) k = count - 2;
    return {k, std::clamp(s - double(k), 0.0, 1.0)};
  }

  const ScalarField& f_;
  const SpaceTimeGrid& g_;
};

using Intervals = std::vector<std::pair<double, double>>;

struct Crossing {
  bool hit = false;
  double fraction = 1.0;  // of the step
  double state = 0.0;
};

// Deterministic part: does the segment [z0, z1] touch a stopping interval?
Crossing segment_hit(const Intervals& iv, double z0, double z1) {
  Crossing best;
  for (const auto& [a, b] : iv) {
    double edge;
    if (z0 < a) {
      if (z1 < a) continue;
      edge = a;
    } else if (z0 > b) {
      if (z1 > b) continue;
      edge = b;
    } else {
      return {true, 0.0, std::clamp(z0, a, b)};
    }
    const double f = (z1 == z0) ? 0.0 : (edge - z0) / (z1 - z0);
    if (!best.hit || f < best.fraction) best = {true, f, edge};
  }
  return best;
}

// Probability that a Brownian bridge from z0 to z1 over the step touches the
// nearest interval edge below and above (no deterministic crossing).
Crossing bridge_hit(const Intervals& iv, double z0, double z1, double var, double u) {
  double below = -INFINITY, above = INFINITY;
  for (const auto& [a, b] : iv) {
    if (b < z0 && b < z1) below = std::max(below, b);
    if (a > z0 && a > z1) above = std::min(above, a);
  }
  auto prob = [&](double edge) {
    if (!std::isfinite(edge)) return 0.0;
    return std::exp(-2.0 * std::abs(z0 - edge) * std::abs(z1 - edge) / var);
  };
  const double pb = prob(below), pa = prob(above);
  const double p = 1.0 - (1.0 - pb) * (1.0 - pa);
  if (!(u < p)) return {};
  return {true, 0.5, pb >= pa ? below : above};
}

PathEnsemble run(const ProblemSpec& spec, const ScalarField& drift, const RegionMask& mask, const SimConfig& cfg) {
  validate(cfg);
  validate(spec);
  if (!same_grid(drift.grid_ptr(), mask.grid_ptr())) throw InvalidArgument("simulate: drift and mask grids differ");
  const auto& g = drift.grid();
  const bool fwd = cfg.orientation == Orientation::kForward;
  const double sign = fwd ? 1.0 : -1.0;
  const double t_final = std::isnan(cfg.t_final) ? (fwd ? g.t(g.nt() - 1) : g.t(0)) : cfg.t_final;
  if (!g.contains(cfg.t0, g.x(0), 1e-12) || !g.contains(t_final, g.x(0), 1e-12))
    throw InvalidArgument("simulate: start or final time outside the grid horizon");
  // Flipped time r = sign * t always increases.
  const double r0 = sign * cfg.t0, r1 = sign * t_final;
  if (!(r1 > r0)) throw InvalidArgument("simulate: final time must lie after the start in the orientation's direction");
  if (cfg.dt > g.dt() * (1.0 + 1e-9)) throw InvalidArgument("simulate: dt must not exceed the grid time step");
  const auto steps = static_cast<std::size_t>(std::ceil((r1 - r0) / cfg.dt - 1e-9));
  const double dt = (r1 - r0) / double(steps);

  std::vector<double> cps(cfg.checkpoints.size());
  for (std::size_t k = 0; k < cps.size(); ++k) {
    cps[k] = sign * cfg.checkpoints[k];
    if (cps[k] < r0 - 1e-12 || cps[k] > r1 + 1e-12)
      throw InvalidArgument("simulate: checkpoint " + std::to_string(cfg.checkpoints[k]) + " outside the run");
    cps[k] = std::clamp(cps[k], r0, r1);
  }

  // Stopping intervals per row; the orientation's boundary row is excluded
  // because reaching it is the horizon exit.
  const std::size_t lo_row = fwd ? 0 : 1, hi_row = fwd ? g.nt() - 2 : g.nt() - 1;
  std::vector<Intervals> rows(g.nt());
  for (std::size_t n = lo_row; n <= hi_row; ++n) rows[n] = mask.stopping_intervals(n);
  auto row_of = [&](double r) { return std::clamp(g.nearest_t(sign * r), lo_row, hi_row); };

  const FieldLookup b(drift);
  const auto& cost = spec.stopping_cost(cfg.orientation);
  const double hbar = spec.hbar;
  auto running = [&](double bval, double x) { return 0.5 * bval * bval + spec.potential(x); };

  PathEnsemble ens;
  ens.config = cfg;
  ens.steps = steps;
  ens.dt = dt;
  ens.paths.resize(cfg.n_paths);
  ens.checkpoint_states.assign(cps.size(), std::vector<double>(cfg.n_paths));
  ens.checkpoint_stopped.assign(cps.size(), std::vector<std::uint8_t>(cfg.n_paths, 0));

  const Intervals& start_iv = rows[row_of(r0)];
  const bool start_stopped = segment_hit(start_iv, cfg.x0, cfg.x0).hit;
  ens.start_in_stopping = start_stopped;
  std::size_t left_hull = 0, non_finite = 0;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : left_hull, non_finite)
#endif
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    CounterStream rng(cfg.seed, p);
    PathRecord rec;
    bool clamped = false;
    double z = cfg.x0, r = r0;
    auto record = [&](double r_from, double z_from, double r_to, double z_to, bool stopped) {
      for (std::size_t k = 0; k < cps.size(); ++k) {
        if (cps[k] <= r_from && !(r_from == r0 && cps[k] == r0)) continue;
        if (cps[k] > r_to && !stopped) continue;
        const double f = (r_to > r_from) ? std::clamp((cps[k] - r_from) / (r_to - r_from), 0.0, 1.0) : 1.0;
        ens.checkpoint_states[k][p] = z_from + f * (z_to - z_from);
        if (stopped && cps[k] >= r_to) ens.checkpoint_stopped[k][p] = 1;
      }
    };
    if (start_stopped) {
      rec = {cfg.t0, cfg.x0, 0.0, cost(cfg.x0), Exit::kStart};
      record(r0, z, r0, z, true);
      ens.paths[p] = rec;
      continue;
    }
    double bz = sign * b(sign * r, z, clamped);
    double l_prev = running(bz, z);
    bool done = false;
    for (std::size_t k = 0; k < steps && !done; ++k) {
      const double r_next = (k + 1 == steps) ? r1 : r0 + double(k + 1) * dt;
      const double z_next = z + bz * dt + std::sqrt(hbar * dt) * rng.normal();
      if (!std::isfinite(z_next)) {
        ++non_finite;
        break;
      }
      const Intervals& iv = rows[row_of(r_next)];
      Crossing c = segment_hit(iv, z, z_next);
      if (!c.hit && cfg.bridge_correction && !iv.empty()) c = bridge_hit(iv, z, z_next, hbar * dt, rng.uniform());
      if (c.hit) {
        const double r_stop = r + c.fraction * dt;
        const double b_stop = sign * b(sign * r_stop, c.state, clamped);
        rec.running_cost += 0.5 * (r_stop - r) * (l_prev + running(b_stop, c.state));
        rec.stop_time = sign * r_stop;
        rec.stopped_state = c.state;
        rec.exit = Exit::kBoundary;
        record(r, z, r_stop, c.state, true);
        done = true;
        break;
      }
      const double b_next = sign * b(sign * r_next, z_next, clamped);
      const double l_next = running(b_next, z_next);
      rec.running_cost += 0.5 * dt * (l_prev + l_next);
      record(r, z, r_next, z_next, false);
      z = z_next;
      r = r_next;
      bz = b_next;
      l_prev = l_next;
    }
    if (!done) {
      rec.stop_time = t_final;
      rec.stopped_state = z;
      rec.exit = Exit::kHorizon;
    }
    rec.terminal_cost = cost(rec.stopped_state);
    if (clamped) ++left_hull;
    ens.paths[p] = rec;
  }
  if (non_finite > 0) throw NumericalError("simulate: non-finite state on " + std::to_string(non_finite) + " paths");
  ens.left_hull = left_hull;
  return ens;
}

}  // namespace

PathEnsemble simulate_forward(const ProblemSpec& spec, const ScalarField& drift, const RegionMask& mask,
                              const SimConfig& cfg) {
  SimConfig c = cfg;
  c.orientation = Orientation::kForward;
  return run(spec, drift, mask, c);
}

PathEnsemble simulate_backward(const ProblemSpec& spec, const ScalarField& drift_star, const RegionMask& mask_star,
                               const SimConfig& cfg) {
  SimConfig c = cfg;
  c.orientation = Orientation::kBackward;
  return run(spec, drift_star, mask_star, c);
}

PathEnsemble simulate(const ProblemSpec& spec, const ScalarField& drift, const RegionMask& mask,
                      const SimConfig& cfg) {
  return run(spec, drift, mask, cfg);
}

Statistic action_estimate(const PathEnsemble& ensemble) { return ensemble.action(); }

ReversedDrift reversed_drift(const ScalarField& drift, const ScalarField& rho, double hbar, double floor_rel) {
  if (!same_grid(drift.grid_ptr(), rho.grid_ptr())) throw InvalidArgument("reversed_drift: grid mismatch");
  const double top = rho.values().maxCoeff();
  if (!(top > 0.0)) throw InvalidArgument("reversed_drift: rho is nowhere positive");
  const double floor = floor_rel * top;
  const auto& grid = drift.grid_ptr();
  const std::size_t nx = grid->nx();
  std::vector<std::uint8_t> below(grid->nt() * nx, 0);
  ScalarField log_rho(grid);
  for (std::size_t n = 0; n < grid->nt(); ++n)
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = rho(n, i);
      below[n * nx + i] = !(v > floor);
      log_rho(n, i) = std::log(std::max(v, std::max(floor, std::numeric_limits<double>::min())));
    }
  // A node is undefined when any node of its gradient stencil is below the
  // floor; the clamped log would otherwise leak into the difference.
  RegionMask undefined(grid);
  std::size_t count = 0;
  for (std::size_t n = 0; n < grid->nt(); ++n)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t lo = i == 0 ? 0 : (i == nx - 1 ? nx - 3 : i - 1);
      const std::size_t hi = i == 0 ? 2 : (i == nx - 1 ? nx - 1 : i + 1);
      bool bad = false;
      for (std::size_t k = lo; k <= hi; ++k) bad = bad || below[n * nx + k];
      if (bad) {
        undefined.set(n, i, Region::kStopping);
        ++count;
      }
    }
  const ScalarField d = gradient_x(log_rho);
  ScalarField out = drift;
  for (std::size_t n = 0; n < grid->nt(); ++n)
    for (std::size_t i = 0; i < grid->nx(); ++i)
      if (!undefined.stopping(n, i)) out(n, i) -= hbar * d(n, i);
  return {std::move(out), std::move(undefined), count};
}

FokkerPlanckResult fokker_planck(const ProblemSpec& spec, const ScalarField& drift, std::span<const double> rho0,
                                 const FokkerPlanckOptions& opts) {
  const auto& grid = drift.grid_ptr();
  const auto& g = *grid;
  const std::size_t nx = g.nx();
  if (rho0.size() != nx) throw InvalidArgument("fokker_planck: rho0 length does not match the grid");
  for (double v : rho0)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("fokker_planck: rho0 must be non-negative");
  if (opts.absorbing && !same_grid(opts.absorbing->grid_ptr(), grid))
    throw InvalidArgument("fokker_planck: absorbing mask on a different grid");

  const double dx = g.dx(), dt = g.dt(), diff = 0.5 * spec.hbar;
  std::vector<double> w(nx, dx);
  w[0] = w[nx - 1] = 0.5 * dx;

  FokkerPlanckResult res{ScalarField(grid), {}, 0.0, 0.0, {}};
  std::copy(rho0.begin(), rho0.end(), res.rho.row(0).begin());
  std::vector<double> a(nx), b(nx), c(nx), d(nx);
  for (std::size_t n = 0; n + 1 < g.nt(); ++n) {
    const std::size_t m = n + 1;
    std::fill(a.begin(), a.end(), 0.0);
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
      b[i] = w[i];
      d[i] = w[i] * res.rho(n, i);
    }
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double bf = 0.5 * (drift(m, i) + drift(m, i + 1));
      res.max_cell_peclet = std::max(res.max_cell_peclet, std::abs(bf) * dx / diff);
      const double plus = std::max(bf, 0.0), minus = std::min(bf, 0.0), k = diff / dx;
      // Face i+1/2 flux leaves cell i and enters cell i+1.
      b[i] += dt * (plus + k);
      c[i] += dt * (minus - k);
      a[i + 1] -= dt * (plus + k);
      b[i + 1] += dt * (-minus + k);
    }
    const bool absorb = opts.absorbing && !(opts.skip_last_row && m == g.nt() - 1);
    if (absorb)
      for (std::size_t i = 0; i < nx; ++i)
        if (opts.absorbing->stopping(m, i)) {
          a[i] = c[i] = d[i] = 0.0;
          b[i] = 1.0;
        }
    solve_tridiagonal(a, b, c, d, res.rho.row(m));
  }
  res.mass.resize(g.nt());
  for (std::size_t n = 0; n < g.nt(); ++n) res.mass[n] = trapezoid(res.rho.row(n), dx);
  res.min_value = res.rho.values().minCoeff();
  if (res.min_value < -1e-12) throw NumericalError("fokker_planck: density became negative");
  if (res.max_cell_peclet > 2.0)
    res.warnings.push_back("cell Peclet number " + std::to_string(res.max_cell_peclet) +
                           " exceeds 2; upwinding adds numerical diffusion");
  return res;
}

BridgeTestReport bridge_markov_test(const BridgeTestConfig& cfg) {
  if (!(cfg.s < cfg.t && cfg.t < cfg.u)) throw InvalidArgument("bridge test: requires s < t < u");
  if (!(cfg.hbar > 0.0)) throw InvalidArgument("bridge test: hbar must be positive");
  if (cfg.n_bins < 3 || cfg.n_paths < 2) throw InvalidArgument("bridge test: need at least 3 bins and 2 paths");

  BridgeTestReport r;
  const double frac = (cfg.t - cfg.s) / (cfg.u - cfg.s);
  r.expected_mean = cfg.x + frac * (cfg.z - cfg.x);
  r.expected_variance = cfg.hbar * (cfg.t - cfg.s) * (cfg.u - cfg.t) / (cfg.u - cfg.s);
  const double sd = std::sqrt(r.expected_variance);

  std::vector<double> samples(cfg.n_paths);
  const double sa = std::sqrt(cfg.hbar * (cfg.t - cfg.s)), sb = std::sqrt(cfg.hbar * (cfg.u - cfg.t));
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    CounterStream rng(cfg.seed, p);
    const double wt = cfg.x + sa * rng.normal();
    const double wu = wt + sb * rng.normal();
    samples[p] = wt + frac * (cfg.z - wu);
  }

  const double n = double(cfg.n_paths);
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : samples) {
    const double e = v - mean, e2 = e * e;
    m2 += e2;
    m3 += e2 * e;
    m4 += e2 * e2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  r.mean = mean;
  r.variance = m2 * n / (n - 1.0);
  r.mean_stderr = std::sqrt(r.variance / n);
  r.variance_stderr = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  r.skewness = m3 / std::pow(m2, 1.5);
  r.skewness_stderr = std::sqrt(6.0 / n);

  // Bin edges over mean +- span_sd; outer bins open.
  const std::size_t nb = cfg.n_bins;
  const double lo = r.expected_mean - cfg.span_sd * sd, width = 2.0 * cfg.span_sd * sd / double(nb);
  r.edges.resize(nb - 1);
  for (std::size_t k = 1; k < nb; ++k) r.edges[k - 1] = lo + double(k) * width;
  r.observed.assign(nb, 0);
  for (double v : samples) {
    const auto it = std::upper_bound(r.edges.begin(), r.edges.end(), v);
    ++r.observed[std::size_t(it - r.edges.begin())];
  }

  const analytic::KernelParams kp{cfg.hbar};
  analytic::QuadratureConfig q;
  auto density = [&](double y) { return analytic::bernstein_transition(cfg.s, cfg.x, cfg.t, y, cfg.u, cfg.z, kp); };
  const double tail = q.tail_sigmas * sd;
  r.expected.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const double a = k == 0 ? r.expected_mean - tail : r.edges[k - 1];
    const double b = k + 1 == nb ? r.expected_mean + tail : r.edges[k];
    r.expected[k] = n * analytic::integrate(density, a, b, q);
  }
  for (std::size_t k = 0; k < nb; ++k) {
    if (r.observed[k] == 0) throw InvalidArgument("bridge test: empty bin " + std::to_string(k) + "; use fewer bins");
    if (r.expected[k] < 5.0)
      throw InvalidArgument("bridge test: expected count below 5 in bin " + std::to_string(k) + "; use fewer bins");
    const double diff = double(r.observed[k]) - r.expected[k];
    r.chi_square += diff * diff / r.expected[k];
  }
  r.dof = nb - 1;
  boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.chi_square));
  r.pass = r.p_value >= cfg.alpha;
  return r;
}

nlohmann::json to_json(const BridgeTestReport& r) {
  return {{"mean", r.mean},
          {"mean_stderr", r.mean_stderr},
          {"variance", r.variance},
          {"variance_stderr", r.variance_stderr},
          {"skewness", r.skewness},
          {"skewness_stderr", r.skewness_stderr},
          {"expected_mean", r.expected_mean},
          {"expected_variance", r.expected_variance},
          {"chi_square", r.chi_square},
          {"dof", r.dof},
          {"p_value", r.p_value},
          {"pass", r.pass},
          {"observed", r.observed},
          {"expected", r.expected}};
}

}  // namespace bernstein::simulate
