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

#include "bernstein/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "bernstein/analytic.hpp"
#include "bernstein/errors.hpp"
#include "bernstein/schrodinger.hpp"
#include "bernstein/simulate.hpp"
#include "bernstein/stopping.hpp"

namespace bernstein::acceptance {
namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double oracle_eta(Orientation o, double t, double x) {
  return o == Orientation::kForward ? analytic::sec7_eta_forward(t, x, 1.0, 1.0)
                                    : analytic::sec7_eta_backward(t, x, 1.0, 1.0);
}

constexpr double kHorizon = 1.0;

}  // namespace

std::string format_line(const CriterionResult& r) {
  return fmt("%s  criterion %2d  %s: %s  (%.1f s)", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
             r.detail.c_str(), r.seconds);
}

Suite::Suite(SuiteOptions opts) : opts_(opts), spec_(sec7_spec(1.0, kHorizon, 3.0)) {}

const Suite::Solved& Suite::solved(Orientation o, std::size_t nx, std::size_t nt) {
  auto key = std::make_tuple(int(o), nx, nt);
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  const auto t0 = std::chrono::steady_clock::now();
  auto sol = hjb::solve_obstacle(spec_, build_grid(spec_, nx, nt), o);
  const double secs = seconds_since(t0);
  auto& slot = cache_[key];
  slot = std::make_unique<Solved>(Solved{std::move(sol), secs});
  return *slot;
}

CriterionResult Suite::run(int id) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = oracle_agreement(); break;
      case 2: r = free_boundary(); break;
      case 3: r = complementarity(); break;
      case 4: r = mc_value(); break;
      case 5: r = survival(); break;
      case 6: r = schrodinger_system(); break;
      case 7: r = drift_reversal(); break;
      case 8: r = bridge(); break;
      case 9: r = classical_comparison(); break;
      case 10: r = convergence(); break;
      default: throw InvalidArgument("no acceptance criterion " + std::to_string(id));
    }
  } catch (const InvalidArgument&) {
    if (id < 1 || id > kCount) throw;
    r.pass = false;
    r.detail = "error";
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = id;
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CriterionResult> Suite::run_all(const std::function<void(const CriterionResult&)>& sink) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCount; ++id) {
    out.push_back(run(id));
    if (sink) sink(out.back());
  }
  return out;
}

// 1. Oracle agreement on 601 x 2001 over {0.1 <= |x| <= 2.5}, both orientations,
//    solver wall time <= 60 s.
CriterionResult Suite::oracle_agreement() {
  CriterionResult r{1, "worked-example oracle agreement", true, "", nlohmann::json::object(), 0.0};
  std::string detail;
  for (Orientation o : {Orientation::kForward, Orientation::kBackward}) {
    const auto& s = solved(o, 601, 2001);
    const auto v = hjb::value_from_eta(s.eta, spec_.hbar);
    const auto& g = v.value.grid();
    double max_rel = 0.0, max_abs = 0.0, max_u = 0.0;
    std::size_t nodes = 0;
    for (std::size_t n = 0; n < g.nt(); ++n)
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const double x = g.x(i), ax = std::abs(x);
        if (ax < 0.1 - 1e-12 || ax > 2.5 + 1e-12) continue;
        const double u = -spec_.hbar * std::log(oracle_eta(o, g.t(n), x));
        const double e = std::abs(v.value(n, i) - u);
        max_rel = std::max(max_rel, e / std::abs(u));
        max_abs = std::max(max_abs, e);
        max_u = std::max(max_u, std::abs(u));
        ++nodes;
      }
    const double norm_rel = max_abs / max_u;
    const bool ok = max_rel <= 1e-2 && norm_rel <= 1e-2 && s.seconds <= 60.0;
    r.pass = r.pass && ok;
    r.metrics[to_string(o)] = {{"max_pointwise_relative_error", max_rel},
                               {"relative_inf_norm_error", norm_rel},
                               {"nodes", nodes},
                               {"solve_seconds", s.seconds}};
    detail += fmt("%s rel err %.2e (norm %.2e, %zu nodes, solve %.1f s); ", to_string(o), max_rel, norm_rel, nodes,
                  s.seconds);
  }
  r.detail = detail + "limits 1e-2 and 60 s";
  return r;
}

// 2. STOPPING set is exactly the x = 0 column plus the boundary row.
CriterionResult Suite::free_boundary() {
  CriterionResult r{2, "free-boundary recovery", true, "", nlohmann::json::object(), 0.0};
  std::string detail;
  for (Orientation o : {Orientation::kForward, Orientation::kBackward}) {
    const auto& m = solved(o, 601, 2001).eta.mask;
    const auto& g = m.grid();
    const std::size_t zero = g.nearest_x(0.0), boundary = o == Orientation::kForward ? g.nt() - 1 : 0;
    std::size_t wrong = 0;
    for (std::size_t n = 0; n < g.nt(); ++n)
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const bool expect = n == boundary || i == zero;
        if (m.stopping(n, i) != expect) ++wrong;
      }
    r.pass = r.pass && wrong == 0 && g.x(zero) == 0.0;
    r.metrics[to_string(o)] = {{"misclassified_nodes", wrong}, {"stopping_nodes", m.count(Region::kStopping)}};
    detail += fmt("%s: %zu misclassified of %zu; ", to_string(o), wrong, g.nx() * g.nt());
  }
  r.detail = detail + "expected column x=0 plus boundary row";
  return r;
}

// 3. Complementarity residual of every converged solve in the suite.
CriterionResult Suite::complementarity() {
  CriterionResult r{3, "complementarity residual", true, "", nlohmann::json::array(), 0.0};
  const std::vector<std::pair<std::size_t, std::size_t>> sizes{{601, 2001}, {151, 126}, {301, 501}, {601, 1001}};
  double worst = 0.0, limit = 0.0;
  for (auto [nx, nt] : sizes)
    for (Orientation o : {Orientation::kForward, Orientation::kBackward}) {
      const auto& s = solved(o, nx, nt);
      const double res = hjb::lcp_residual_norm(s.eta, spec_);
      limit = 10.0 * s.eta.config.psor_tol;
      worst = std::max(worst, res);
      r.pass = r.pass && res <= limit;
      r.metrics.push_back({{"orientation", to_string(o)}, {"nx", nx}, {"nt", nt}, {"scaled_residual", res}});
    }
  r.detail = fmt("worst scaled residual %.2e over %zu solves, limit %.1e", worst, 2 * sizes.size(), limit);
  return r;
}

// 4. Monte Carlo action under the optimal and a suboptimal policy.
CriterionResult Suite::mc_value() {
  CriterionResult r{4, "Monte Carlo value consistency", false, "", nlohmann::json::object(), 0.0};
  const auto& s = solved(Orientation::kForward, 601, 1001);
  const auto v = hjb::value_from_eta(s.eta, spec_.hbar);
  const double u_oracle = -std::log(oracle_eta(Orientation::kForward, -0.5, 1.0));
  simulate::SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 20000;
  cfg.seed = opts_.seed;
  cfg.t0 = -0.5;
  cfg.x0 = 1.0;
  const auto opt = simulate::action_estimate(simulate::simulate_forward(spec_, v.drift, s.eta.mask, cfg));
  const ScalarField zero(v.drift.grid_ptr(), 0.0);
  const auto sub = simulate::action_estimate(simulate::simulate_forward(spec_, zero, s.eta.mask, cfg));
  const bool opt_ok = std::abs(opt.mean - u_oracle) <= 3.0 * opt.stderr_;
  const bool sub_ok = sub.mean >= u_oracle - 3.0 * sub.stderr_;
  r.pass = opt_ok && sub_ok;
  r.metrics = {{"oracle", u_oracle},
               {"optimal", {{"mean", opt.mean}, {"stderr", opt.stderr_}}},
               {"suboptimal", {{"mean", sub.mean}, {"stderr", sub.stderr_}}}};
  r.detail = fmt("oracle U(-T/2,1)=%.5f; optimal %.5f +- %.5f (%.2f se); b=0 policy %.5f +- %.5f", u_oracle, opt.mean,
                 opt.stderr_, (opt.mean - u_oracle) / opt.stderr_, sub.mean, sub.stderr_);
  return r;
}

// 5. Survival function: driftless barrier (PDE and MC) and the worked example.
CriterionResult Suite::survival() {
  CriterionResult r{5, "survival function", true, "", nlohmann::json::object(), 0.0};
  const double exact = std::erf(1.0 / std::sqrt(2.0));

  // Driftless Brownian motion absorbed at 0, from x = 1 over unit time.
  ProblemSpec bm;
  bm.half_horizon = 0.6;
  bm.x_min = -4.0;
  bm.x_max = 4.0;
  const auto g = build_grid(bm, 801, 601);
  RegionMask mask(g);
  const std::size_t zero = g->nearest_x(0.0);
  for (std::size_t n = 0; n < g->nt(); ++n) mask.set(n, zero, Region::kStopping);
  for (std::size_t i = 0; i < g->nx(); ++i) mask.set(g->nt() - 1, i, Region::kStopping);
  const ScalarField no_drift(g, 0.0);
  const double threshold = 0.4;
  const auto q = stopping::solve_q({Orientation::kForward, threshold, &no_drift, &mask, bm.hbar});
  const double q_pde = q.evaluate(-0.6, 1.0);
  simulate::SimConfig cfg;
  cfg.dt = g->dt();
  cfg.n_paths = 100000;
  cfg.seed = opts_.seed + 1;
  cfg.t0 = -0.6;
  cfg.x0 = 1.0;
  cfg.t_final = threshold;
  const auto mc = stopping::empirical_survival(simulate::simulate_forward(bm, no_drift, mask, cfg), threshold);
  const bool pde_ok = std::abs(q_pde - exact) <= 1e-3;
  const bool mc_ok = std::abs(mc.estimate - exact) <= 3.0 * mc.stderr_;
  r.pass = pde_ok && mc_ok;
  r.metrics["driftless"] = {{"exact", exact}, {"pde", q_pde}, {"mc", mc.estimate}, {"mc_stderr", mc.stderr_}};
  std::string detail = fmt("driftless: PDE %.5f (err %.1e), MC %.5f +- %.5f vs %.5f; ", q_pde, std::abs(q_pde - exact),
                           mc.estimate, mc.stderr_, exact);

  // Worked example under the optimal drift.
  const auto& s = solved(Orientation::kForward, 601, 1001);
  const auto v = hjb::value_from_eta(s.eta, spec_.hbar);
  const double t_tilde = 0.25;
  const auto q7 = stopping::solve_q({Orientation::kForward, t_tilde, &v.drift, &s.eta.mask, spec_.hbar});
  int agree = 0;
  nlohmann::json starts = nlohmann::json::array();
  const double xs[] = {-1.5, -0.5, 0.3, 1.0, 2.0};
  for (std::size_t k = 0; k < 5; ++k) {
    simulate::SimConfig c;
    c.dt = 1e-3;
    c.n_paths = 20000;
    c.seed = opts_.seed + 10 + k;
    c.t0 = -0.5;
    c.x0 = xs[k];
    c.t_final = t_tilde;
    const auto e = stopping::empirical_survival(simulate::simulate_forward(spec_, v.drift, s.eta.mask, c), t_tilde);
    const double pde = q7.evaluate(c.t0, c.x0);
    const bool ok = std::abs(e.estimate - pde) <= 3.0 * e.stderr_;
    agree += ok;
    starts.push_back({{"x0", c.x0}, {"pde", pde}, {"mc", e.estimate}, {"stderr", e.stderr_}, {"agree", ok}});
  }
  simulate::SimConfig c;
  c.dt = 1e-3;
  c.n_paths = 20000;
  c.seed = opts_.seed + 20;
  c.t0 = -0.5;
  c.x0 = 1.0;
  c.t_final = t_tilde;
  c.checkpoints = {-0.3, -0.1, 0.1, 0.2};
  const auto mart = stopping::martingale_check(q7, simulate::simulate_forward(spec_, v.drift, s.eta.mask, c));
  r.pass = r.pass && agree == 5 && mart.pass && mart.checkpoints.size() == 4;
  r.metrics["worked_example"] = {{"starts", starts}, {"martingale", stopping::to_json(mart)}};
  double worst_z = 0.0;
  for (const auto& cp : mart.checkpoints) worst_z = std::max(worst_z, cp.difference / cp.stderr_);
  r.detail = detail + fmt("example: %d/5 starts agree, martingale %s (worst %.2f se)", agree,
                          mart.pass ? "holds at 4 checkpoints" : "FAILS", worst_z);
  return r;
}

namespace {

struct SchrodingerCase {
  GridPtr grid;
  schrodinger::SchrodingerSolution sol;
};

SchrodingerCase schrodinger_case() {
  auto grid = build_grid(-5.0, 5.0, 201, -0.5, 0.5, 101);
  auto m = schrodinger::make_marginals(schrodinger::gaussian_density(*grid, -1.0, 0.5),
                                       schrodinger::gaussian_density(*grid, 1.0, 0.5), grid->dx());
  schrodinger::SinkhornOptions o;
  o.tol = 1e-8;
  o.max_iter = 500;
  return {grid, schrodinger::solve_schrodinger(m, grid, 1.0, o)};
}

}  // namespace

// 6. Sinkhorn convergence, mass of rho, gauge invariance.
CriterionResult Suite::schrodinger_system() {
  CriterionResult r{6, "Schrodinger system", false, "", nlohmann::json::object(), 0.0};
  const auto c = schrodinger_case();
  const auto& f = c.sol.factors;
  const auto masses = schrodinger::slice_masses(c.sol.rho);
  double mass_dev = 0.0;
  for (double m : masses) mass_dev = std::max(mass_dev, std::abs(m - 1.0));
  const auto scaled = schrodinger::rescale_gauge(f, 3.7);
  const auto rho2 = schrodinger::bernstein_density(schrodinger::propagate_eta(scaled, c.grid, 1.0),
                                                   schrodinger::propagate_eta_star(scaled, c.grid, 1.0));
  const double gauge = (rho2.values() - c.sol.rho.values()).cwiseAbs().maxCoeff() /
                       std::max(1.0, c.sol.rho.values().cwiseAbs().maxCoeff());
  r.pass = f.final_marginal_error <= 1e-8 && f.iterations <= 500 && mass_dev <= 1e-6 && gauge <= 1e-12;
  r.metrics = {{"iterations", f.iterations},     {"marginal_residual", f.final_marginal_error},
               {"max_mass_deviation", mass_dev}, {"gauge_change", gauge},
               {"monotone_residual", f.monotone_residual}};
  r.detail = fmt("%d iterations, residual %.1e; mass dev %.1e; gauge change %.1e", f.iterations,
                 f.final_marginal_error, mass_dev, gauge);
  return r;
}

// 7. B - hbar grad log(eta eta*) = -hbar grad log eta*.
CriterionResult Suite::drift_reversal() {
  CriterionResult r{7, "drift reversal identity", false, "", nlohmann::json::object(), 0.0};
  const auto c = schrodinger_case();
  const auto b = schrodinger::drift_from_factors(c.sol.factors, c.grid, 1.0);
  const auto rev = simulate::reversed_drift(b, c.sol.rho, 1.0);
  ScalarField target = gradient_x(log_field(c.sol.eta_star));
  target.values() *= -1.0;
  double diff = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < c.grid->nt(); ++n)
    for (std::size_t i = 0; i < c.grid->nx(); ++i) {
      if (rev.undefined.stopping(n, i)) continue;
      diff = std::max(diff, std::abs(rev.drift_star(n, i) - target(n, i)));
      scale = std::max(scale, std::abs(target(n, i)));
    }
  const double scaled = diff / std::max(1.0, scale);
  r.pass = scaled <= 1e-3;
  r.metrics = {{"scaled_inf_norm", scaled}, {"undefined_nodes", rev.undefined_count}};
  r.detail = fmt("scaled inf-norm %.2e (limit 1e-3), %zu of %zu nodes below the density floor", scaled,
                 rev.undefined_count, c.grid->nx() * c.grid->nt());
  return r;
}

// 8. Bridge chi-square test over 20 seeds.
CriterionResult Suite::bridge() {
  CriterionResult r{8, "two-sided Markov bridge test", false, "", nlohmann::json::object(), 0.0};
  int passed = 0;
  double min_p = 1.0;
  nlohmann::json ps = nlohmann::json::array();
  for (int k = 0; k < 20; ++k) {
    simulate::BridgeTestConfig cfg;
    cfg.seed = opts_.seed + 100 + std::uint64_t(k);
    const auto rep = simulate::bridge_markov_test(cfg);
    passed += rep.pass;
    min_p = std::min(min_p, rep.p_value);
    ps.push_back(rep.p_value);
  }
  r.pass = passed >= 19;
  r.metrics = {{"passed", passed}, {"p_values", ps}};
  r.detail = fmt("%d/20 seeds pass at the 1%% level (min p %.3f)", passed, min_p);
  return r;
}

// 9. Stopping helps: U <= H~ everywhere, strictly at (0, 1).
CriterionResult Suite::classical_comparison() {
  CriterionResult r{9, "classical comparison", false, "", nlohmann::json::object(), 0.0};
  const auto& s = solved(Orientation::kForward, 601, 2001);
  const auto u = hjb::value_from_eta(s.eta, spec_.hbar);
  const auto h = hjb::classical_value(spec_, s.eta.eta.grid_ptr(), Orientation::kForward, s.eta.config);
  const double dominance = (u.value.values() - h.value.values()).maxCoeff();
  const auto& g = u.value.grid();
  const std::size_t n = g.nearest_t(0.0), i = g.nearest_x(1.0);
  const double u01 = u.value(n, i), h01 = h.value(n, i);
  const double u_or = -std::log(analytic::sec7_eta_forward(0.0, 1.0, 1.0, 1.0));
  const double h_or = -std::log(analytic::sec7_classical_eta(0.0, 1.0, 1.0, 1.0));
  const double tol = std::abs(u01 - u_or) + std::abs(h01 - h_or) + 20.0 * s.eta.config.psor_tol;
  r.pass = dominance <= 1e-6 && (h01 - u01) > tol;
  r.metrics = {{"max_U_minus_H", dominance}, {"U_0_1", u01},         {"H_0_1", h01},
               {"U_oracle", u_or},           {"H_oracle", h_or},     {"tolerance", tol}};
  r.detail = fmt("max(U - H~) = %.2e; U(0,1) = %.5f < H~(0,1) = %.5f, gap %.3f vs tolerance %.1e", dominance, u01, h01,
                 h01 - u01, tol);
  return r;
}

// 10. Observed order >= 1 under (dx, dt) -> (dx/2, dt/4).
CriterionResult Suite::convergence() {
  CriterionResult r{10, "convergence order", true, "", nlohmann::json::object(), 0.0};
  const std::pair<std::size_t, std::size_t> levels[] = {{151, 126}, {301, 501}, {601, 2001}};
  std::string detail;
  for (Orientation o : {Orientation::kForward, Orientation::kBackward}) {
    const auto coarse = build_grid(spec_, levels[0].first, levels[0].second);
    std::vector<double> oracle(coarse->nt() * coarse->nx(), 0.0);
    for (std::size_t n = 0; n < coarse->nt(); ++n)
      for (std::size_t i = 0; i < coarse->nx(); ++i)
        if (std::abs(coarse->x(i)) >= 0.1 - 1e-12)
          oracle[n * coarse->nx() + i] = -std::log(oracle_eta(o, coarse->t(n), coarse->x(i)));
    double err[3];
    for (int l = 0; l < 3; ++l) {
      const auto& s = solved(o, levels[l].first, levels[l].second);
      const auto v = hjb::value_from_eta(s.eta, spec_.hbar);
      const std::size_t sx = (levels[l].first - 1) / (levels[0].first - 1);
      const std::size_t st = (levels[l].second - 1) / (levels[0].second - 1);
      err[l] = 0.0;
      for (std::size_t n = 0; n < coarse->nt(); ++n)
        for (std::size_t i = 0; i < coarse->nx(); ++i)
          if (std::abs(coarse->x(i)) >= 0.1 - 1e-12)
            err[l] = std::max(err[l], std::abs(v.value(n * st, i * sx) - oracle[n * coarse->nx() + i]));
    }
    const double p1 = std::log2(err[0] / err[1]), p2 = std::log2(err[1] / err[2]);
    r.pass = r.pass && p1 >= 1.0 && p2 >= 1.0;
    r.metrics[to_string(o)] = {{"errors", {err[0], err[1], err[2]}}, {"orders", {p1, p2}}};
    detail += fmt("%s errors %.1e/%.1e/%.1e orders %.2f, %.2f; ", to_string(o), err[0], err[1], err[2], p1, p2);
  }
  r.detail = detail + "limit 1.0";
  return r;
}

}  // namespace bernstein::acceptance
