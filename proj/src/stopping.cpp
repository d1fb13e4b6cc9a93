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

#include "bernstein/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bernstein/errors.hpp"

namespace bernstein::stopping {

const char* to_string(Lemma3Class c) {
  switch (c) {
    case Lemma3Class::kZero: return "zero";
    case Lemma3Class::kOne: return "one";
    case Lemma3Class::kPde: return "pde";
  }
  return "?";
}

std::vector<double> continuation_extent(const RegionMask& mask, Orientation o) {
  const auto& g = mask.grid();
  const bool fwd = o == Orientation::kForward;
  std::vector<double> out(g.nx());
  for (std::size_t i = 0; i < g.nx(); ++i) {
    // Scan from the boundary row inwards; the boundary row is STOPPING by
    // convention, so the last interior row stands in for it.
    double v = fwd ? g.t(0) : g.t(g.nt() - 1);
    for (std::size_t k = 1; k < g.nt(); ++k) {
      const std::size_t n = fwd ? g.nt() - 1 - k : k;
      if (!mask.stopping(n, i)) {
        v = (k == 1) ? (fwd ? g.t(g.nt() - 1) : g.t(0)) : g.t(n);
        break;
      }
    }
    out[i] = v;
  }
  return out;
}

Lemma3Class classify_lemma3(std::size_t n, std::size_t i, double threshold, const RegionMask& mask, Orientation o,
                            const std::vector<double>& extent) {
  const double t = mask.grid().t(n);
  const bool s = mask.stopping(n, i);
  if (o == Orientation::kForward) {
    if ((s && t > threshold) || (!s && t >= threshold)) return Lemma3Class::kOne;
    if ((s && t <= threshold) || (!s && threshold >= extent[i])) return Lemma3Class::kZero;
  } else {
    if ((s && t < threshold) || (!s && t <= threshold)) return Lemma3Class::kOne;
    if ((s && t >= threshold) || (!s && threshold <= extent[i])) return Lemma3Class::kZero;
  }
  return Lemma3Class::kPde;
}

Lemma3Class classify_lemma3(std::size_t n, std::size_t i, double threshold, const RegionMask& mask, Orientation o) {
  return classify_lemma3(n, i, threshold, mask, o, continuation_extent(mask, o));
}

namespace {

// Linear interpolation of a node-sampled slice.
double slice_at(const SpaceTimeGrid& g, std::span<const double> v, double x) {
  const double s = std::clamp((x - g.x(0)) / g.dx(), 0.0, double(g.nx() - 1));
  auto i = static_cast<std::size_t>(std::floor(s));
  if (i >= g.nx() - 1) i = g.nx() - 2;
  const double f = s - double(i);
  return (1.0 - f) * v[i] + f * v[i + 1];
}

}  // namespace

double SurvivalSolution::evaluate(double t, double x) const {
  const auto& g = q.grid();
  if (!(t >= g.t(0) - 1e-12 && t <= g.t(g.nt() - 1) + 1e-12))
    throw DomainError("survival: time outside the horizon", t, x);
  // Positions beyond the truncation take the edge value (zero-flux edges).
  x = std::clamp(x, g.x(0), g.x(g.nx() - 1));
  const bool fwd = orientation == Orientation::kForward;
  const double eps = 1e-12 * std::max(1.0, std::abs(threshold));
  // Beyond the threshold only CONTINUATION positions are queried by
  // unstopped paths; the closed form there is 1.
  if (fwd ? t > threshold + eps : t < threshold - eps) return 1.0;
  if (std::abs(t - threshold) <= eps) return slice_at(g, threshold_slice, x);
  // Bracket t between two levels: grid rows on the PDE side, plus T~.
  const double s = (t - g.t(0)) / g.dt();
  auto n = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, double(g.nt() - 2)));
  double t_a = g.t(n), t_b = g.t(n + 1);
  double v_a = slice_at(g, q.row(n), x), v_b = slice_at(g, q.row(n + 1), x);
  if (fwd && t_b > threshold) {
    t_b = threshold;
    v_b = slice_at(g, threshold_slice, x);
  } else if (!fwd && t_a < threshold) {
    t_a = threshold;
    v_a = slice_at(g, threshold_slice, x);
  }
  const double f = std::clamp((t - t_a) / (t_b - t_a), 0.0, 1.0);
  return (1.0 - f) * v_a + f * v_b;
}

SurvivalSolution solve_q(const SurvivalProblem& pb, const SolveOptions& opts) {
  if (!pb.drift || !pb.mask) throw InvalidArgument("solve_q: drift and mask are required");
  if (!same_grid(pb.drift->grid_ptr(), pb.mask->grid_ptr())) throw InvalidArgument("solve_q: grid mismatch");
  if (!(pb.hbar > 0.0)) throw InvalidArgument("solve_q: hbar must be positive");
  const auto& grid = pb.drift->grid_ptr();
  const auto& g = *grid;
  const bool fwd = pb.orientation == Orientation::kForward;
  if (!(pb.threshold > g.t(0) && pb.threshold < g.t(g.nt() - 1)))
    throw InvalidArgument("solve_q: threshold must lie strictly inside the horizon");
  const RegionMask& mask = *pb.mask;
  const std::size_t nx = g.nx();
  const double eps = 1e-12 * std::max(1.0, std::abs(pb.threshold));

  SurvivalSolution sol{ScalarField(grid), std::vector<Lemma3Class>(g.nt() * nx), pb.orientation, pb.threshold,
                       std::vector<double>(nx), 0.0, 0};
  const auto extent = continuation_extent(mask, pb.orientation);
  for (std::size_t n = 0; n < g.nt(); ++n)
    for (std::size_t i = 0; i < nx; ++i) {
      const auto c = classify_lemma3(n, i, pb.threshold, mask, pb.orientation, extent);
      sol.classes[n * nx + i] = c;
      if (c == Lemma3Class::kOne) sol.q(n, i) = 1.0;
    }

  // Rows on the PDE side of T~ in march order.
  std::vector<std::size_t> rows;
  if (fwd) {
    for (std::size_t n = g.nt(); n-- > 0;)
      if (g.t(n) < pb.threshold - eps) rows.push_back(n);
  } else {
    for (std::size_t n = 0; n < g.nt(); ++n)
      if (g.t(n) > pb.threshold + eps) rows.push_back(n);
  }
  if (rows.empty()) throw InvalidArgument("solve_q: no grid row beyond the threshold");

  // Terminal data at T~: 1 on CONTINUATION, 0 on STOPPING, read from the
  // first row on the PDE side (the stopping set there is the one touched
  // immediately before T~).
  for (std::size_t i = 0; i < nx; ++i) sol.threshold_slice[i] = mask.stopping(rows.front(), i) ? 0.0 : 1.0;

  const double diff = 0.5 * pb.hbar, dx = g.dx();
  std::vector<double> a(nx), b(nx), c(nx), d(nx), prev(sol.threshold_slice);
  double t_prev = pb.threshold;
  for (std::size_t n : rows) {
    const double dtau = std::abs(g.t(n) - t_prev);
    const double k = dtau * diff / (dx * dx);
    for (std::size_t i = 0; i < nx; ++i) {
      const auto cls = sol.classes[n * nx + i];
      if (cls != Lemma3Class::kPde) {
        a[i] = c[i] = 0.0;
        b[i] = 1.0;
        d[i] = cls == Lemma3Class::kOne ? 1.0 : 0.0;
        continue;
      }
      d[i] = prev[i];
      if (i == 0 || i + 1 == nx) {
        // Zero flux through the truncation edge (ghost node mirrors the neighbour).
        a[i] = i == 0 ? 0.0 : -2.0 * k;
        c[i] = i == 0 ? -2.0 * k : 0.0;
        b[i] = 1.0 + 2.0 * k;
        continue;
      }
      const double vel = (fwd ? 1.0 : -1.0) * (*pb.drift)(n, i);
      const double pe = std::abs(vel) * dx / diff;
      sol.max_cell_peclet = std::max(sol.max_cell_peclet, pe);
      if (pe <= 2.0) {
        const double adv = dtau * vel / (2.0 * dx);
        a[i] = -k + adv;
        c[i] = -k - adv;
        b[i] = 1.0 + 2.0 * k;
      } else {
        ++sol.upwind_nodes;
        const double adv = dtau * std::abs(vel) / dx;
        a[i] = -k - (vel < 0.0 ? adv : 0.0);
        c[i] = -k - (vel > 0.0 ? adv : 0.0);
        b[i] = 1.0 + 2.0 * k + adv;
      }
    }
    auto row = sol.q.row(n);
    solve_tridiagonal(a, b, c, d, row);
    for (std::size_t i = 0; i < nx; ++i) {
      double& v = row[i];
      if (!std::isfinite(v) || v < -opts.max_principle_tol || v > 1.0 + opts.max_principle_tol)
        throw NumericalError("solve_q: maximum principle violated at t = " + std::to_string(g.t(n)) +
                             ", x = " + std::to_string(g.x(i)) + " (q = " + std::to_string(v) + ")");
      v = std::clamp(v, 0.0, 1.0);
    }
    prev.assign(row.begin(), row.end());
    t_prev = g.t(n);
  }
  return sol;
}

Estimate empirical_survival(const simulate::PathEnsemble& ens, double threshold) {
  const bool fwd = ens.config.orientation == Orientation::kForward;
  std::vector<double> v(ens.paths.size());
  for (std::size_t p = 0; p < v.size(); ++p) {
    const auto& r = ens.paths[p];
    const bool survive = fwd ? (!r.hit() || r.stop_time > threshold) : (!r.hit() || r.stop_time < threshold);
    v[p] = survive ? 1.0 : 0.0;
  }
  const auto s = simulate::summarize(v);
  return {s.mean, s.stderr_, s.n};
}

MartingaleReport martingale_check(const SurvivalSolution& q, const simulate::PathEnsemble& ens, double sigmas) {
  if (ens.config.orientation != q.orientation) throw InvalidArgument("martingale_check: orientation mismatch");
  const bool fwd = q.orientation == Orientation::kForward;
  const double t0 = ens.config.t0;
  MartingaleReport rep;
  rep.q0 = q.evaluate(t0, ens.config.x0);
  const auto& cps = ens.config.checkpoints;
  rep.pass = true;
  for (std::size_t k = 0; k < cps.size(); ++k) {
    const double t = cps[k];
    const bool inside = fwd ? (t >= t0 - 1e-12 && t <= q.threshold + 1e-12)
                            : (t <= t0 + 1e-12 && t >= q.threshold - 1e-12);
    if (!inside)
      throw InvalidArgument("martingale_check: checkpoint " + std::to_string(t) + " outside [t0, threshold]");
    std::vector<double> v(ens.paths.size());
    for (std::size_t p = 0; p < v.size(); ++p) {
      const auto& r = ens.paths[p];
      v[p] = ens.checkpoint_stopped[k][p] ? q.evaluate(r.stop_time, r.stopped_state)
                                          : q.evaluate(t, ens.checkpoint_states[k][p]);
    }
    const auto s = simulate::summarize(v);
    MartingaleCheckpoint c{t, s.mean, s.stderr_, std::abs(s.mean - rep.q0), false};
    c.within = c.difference <= sigmas * c.stderr_ + 1e-12;
    rep.pass = rep.pass && c.within;
    rep.checkpoints.push_back(c);
  }
  return rep;
}

nlohmann::json to_json(const MartingaleReport& r) {
  nlohmann::json cps = nlohmann::json::array();
  for (const auto& c : r.checkpoints)
    cps.push_back({{"t", c.t}, {"mean", c.mean}, {"stderr", c.stderr_}, {"difference", c.difference},
                   {"within", c.within}});
  return {{"q0", r.q0}, {"checkpoints", cps}, {"pass", r.pass}};
}

}  // namespace bernstein::stopping
