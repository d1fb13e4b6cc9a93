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

#include "bernstein/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "bernstein/analytic.hpp"
#include "bernstein/errors.hpp"
#include "bernstein/io.hpp"
#include "bernstein/stopping.hpp"

namespace bernstein::experiments {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"sec7-forward",      "sec7-backward", "sec7-classical-compare",
                                              "schrodinger",       "stopping-dist", "bridge-test",
                                              "convergence-study"};
  return names;
}

// --- config parsing ---------------------------------------------------------

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + std::size_t(std::count(text.begin(), text.begin() + std::ptrdiff_t(offset), '\n'));
}

// Best-effort location of a dotted key path: successive "key" searches.
std::size_t line_of_path(const std::string& text, const std::string& path) {
  std::size_t pos = 0;
  bool found = false;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (auto br = key.find('['); br != std::string::npos) key.resize(br);
    const std::size_t hit = text.find('"' + key + '"', pos);
    if (hit == std::string::npos) break;
    pos = hit;
    found = true;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return found ? line_of_offset(text, pos) : 0;
}

class Parser {
 public:
  Parser(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    const std::size_t line = path.empty() ? 0 : line_of_path(text_, path);
    std::string where = source_;
    if (line) where += ":" + std::to_string(line);
    throw InvalidArgument(where + ": " + (path.empty() ? "" : "field '" + path + "': ") + msg);
  }

  void known(const nlohmann::json& j, const std::string& path, std::initializer_list<const char*> keys) const {
    if (!j.is_object()) fail(path, "must be an object");
    for (const auto& [k, _] : j.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; })) {
        std::string valid;
        for (const char* s : keys) valid += (valid.empty() ? "" : ", ") + std::string(s);
        fail(join(path, k), "unknown field (valid: " + valid + ")");
      }
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  void number(const nlohmann::json& j, const std::string& path, const char* key, double& out) const {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) fail(join(path, key), "must be a number");
    out = j[key].get<double>();
    if (!std::isfinite(out)) fail(join(path, key), "must be finite");
  }

  void positive(const nlohmann::json& j, const std::string& path, const char* key, double& out) const {
    number(j, path, key, out);
    if (j.contains(key) && !(out > 0.0)) fail(join(path, key), "must be positive");
  }

  void count(const nlohmann::json& j, const std::string& path, const char* key, std::size_t& out,
             std::size_t min = 1) const {
    if (!j.contains(key)) return;
    if (!j[key].is_number_unsigned() || j[key].get<std::size_t>() < min)
      fail(join(path, key), "must be an integer >= " + std::to_string(min));
    out = j[key].get<std::size_t>();
  }

  void seed(const nlohmann::json& j, const std::string& path, const char* key, std::uint64_t& out) const {
    if (!j.contains(key)) return;
    if (!j[key].is_number_unsigned()) fail(join(path, key), "must be a non-negative integer");
    out = j[key].get<std::uint64_t>();
  }

  void numbers(const nlohmann::json& j, const std::string& path, const char* key, std::vector<double>& out) const {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) fail(join(path, key), "must be an array of numbers");
    out.clear();
    for (const auto& v : j[key]) {
      if (!v.is_number()) fail(join(path, key), "must be an array of numbers");
      out.push_back(v.get<double>());
    }
  }

  GridSize grid(const nlohmann::json& j, const std::string& path) const {
    known(j, path, {"nx", "nt"});
    GridSize g;
    count(j, path, "nx", g.nx, 3);
    count(j, path, "nt", g.nt, 2);
    return g;
  }

  template <class F>
  auto wrap(const std::string& path, F&& f) const {
    try {
      return f();
    } catch (const InvalidArgument& e) {
      fail(path, e.what());
    }
  }

 private:
  const std::string& text_;
  std::string source_;
};

bool is_sec7(const ProblemSpec& spec) {
  const auto a = to_json(spec), b = to_json(sec7_spec());
  return a["potential"] == b["potential"] && a["terminal_cost"] == b["terminal_cost"] &&
         a["initial_cost"] == b["initial_cost"];
}

const char* domain_name(schrodinger::SinkhornOptions::Domain d) {
  switch (d) {
    case schrodinger::SinkhornOptions::Domain::kLinear: return "linear";
    case schrodinger::SinkhornOptions::Domain::kLog: return "log";
    default: return "auto";
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(source + ":" + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                          ": syntax error: " + e.what());
  }
  const Parser p(text, source);
  p.known(j, "",
          {"experiment", "spec", "grid", "solver", "sim", "marginals", "stopping", "bridge", "levels", "min_order",
           "oracle_tol", "dominance_tol", "exclusion", "comparison_radius", "output_stride", "output_dir"});

  ExperimentConfig c;
  if (!j.contains("experiment")) p.fail("experiment", "missing (valid: sec7-forward, ...)");
  if (!j["experiment"].is_string()) p.fail("experiment", "must be a string");
  c.experiment = j["experiment"].get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    std::string valid;
    for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
    p.fail("experiment", "unknown experiment '" + c.experiment + "' (valid: " + valid + ")");
  }

  if (j.contains("spec")) {
    p.known(j["spec"], "spec", {"hbar", "half_horizon", "x_min", "x_max", "potential", "terminal_cost", "initial_cost"});
    auto merged = to_json(sec7_spec());
    merged.merge_patch(j["spec"]);
    c.spec = p.wrap("spec", [&] { return problem_spec_from_json(merged); });
  }
  if (j.contains("grid")) c.grid = p.grid(j["grid"], "grid");
  if (j.contains("solver")) c.solver = p.wrap("solver", [&] { return hjb::solver_config_from_json(j["solver"]); });
  if (j.contains("sim")) c.sim = p.wrap("sim", [&] { return simulate::sim_config_from_json(j["sim"]); });

  if (j.contains("marginals")) {
    const auto& m = j["marginals"];
    p.known(m, "marginals", {"mean_init", "sd_init", "mean_final", "sd_final", "sinkhorn"});
    MarginalsConfig mc;
    p.number(m, "marginals", "mean_init", mc.mean_init);
    p.positive(m, "marginals", "sd_init", mc.sd_init);
    p.number(m, "marginals", "mean_final", mc.mean_final);
    p.positive(m, "marginals", "sd_final", mc.sd_final);
    if (m.contains("sinkhorn")) {
      const auto& s = m["sinkhorn"];
      const std::string sp = "marginals.sinkhorn";
      p.known(s, sp, {"tol", "max_iter", "gauge_index", "domain"});
      p.positive(s, sp, "tol", mc.sinkhorn.tol);
      std::size_t it = std::size_t(mc.sinkhorn.max_iter);
      p.count(s, sp, "max_iter", it);
      mc.sinkhorn.max_iter = int(it);
      if (s.contains("gauge_index")) {
        if (!s["gauge_index"].is_number_integer()) p.fail(sp + ".gauge_index", "must be an integer (-1: auto)");
        mc.sinkhorn.gauge_index = s["gauge_index"].get<std::ptrdiff_t>();
      }
      if (s.contains("domain")) {
        const auto d = s["domain"].is_string() ? s["domain"].get<std::string>() : std::string();
        using D = schrodinger::SinkhornOptions::Domain;
        if (d == "auto") mc.sinkhorn.domain = D::kAuto;
        else if (d == "linear") mc.sinkhorn.domain = D::kLinear;
        else if (d == "log") mc.sinkhorn.domain = D::kLog;
        else p.fail(sp + ".domain", "must be \"auto\", \"linear\" or \"log\"");
      }
    }
    c.marginals = mc;
  }

  if (j.contains("stopping")) {
    const auto& s = j["stopping"];
    p.known(s, "stopping", {"orientation", "threshold", "t0", "starts", "martingale_x0", "checkpoints", "sigmas"});
    StoppingConfig sc;
    if (s.contains("orientation")) {
      if (!s["orientation"].is_string()) p.fail("stopping.orientation", "must be \"forward\" or \"backward\"");
      sc.orientation = p.wrap("stopping.orientation",
                              [&] { return orientation_from_string(s["orientation"].get<std::string>()); });
    }
    p.number(s, "stopping", "threshold", sc.threshold);
    p.number(s, "stopping", "t0", sc.t0);
    p.numbers(s, "stopping", "starts", sc.starts);
    if (sc.starts.empty()) p.fail("stopping.starts", "needs at least one start point");
    p.number(s, "stopping", "martingale_x0", sc.martingale_x0);
    p.numbers(s, "stopping", "checkpoints", sc.checkpoints);
    p.positive(s, "stopping", "sigmas", sc.sigmas);
    c.stopping = sc;
  }

  if (j.contains("bridge")) {
    const auto& b = j["bridge"];
    p.known(b, "bridge", {"s", "x", "u", "z", "t", "hbar", "n_paths", "n_bins", "seed", "alpha", "span_sd"});
    simulate::BridgeTestConfig bc;
    for (auto [key, target] : {std::pair{"s", &bc.s}, std::pair{"x", &bc.x}, std::pair{"u", &bc.u},
                               std::pair{"z", &bc.z}, std::pair{"t", &bc.t}})
      p.number(b, "bridge", key, *target);
    p.positive(b, "bridge", "hbar", bc.hbar);
    p.count(b, "bridge", "n_paths", bc.n_paths, 2);
    p.count(b, "bridge", "n_bins", bc.n_bins, 2);
    p.seed(b, "bridge", "seed", bc.seed);
    p.positive(b, "bridge", "alpha", bc.alpha);
    p.positive(b, "bridge", "span_sd", bc.span_sd);
    if (!(bc.s < bc.t && bc.t < bc.u)) p.fail("bridge.t", "need s < t < u");
    if (!(bc.alpha < 1.0)) p.fail("bridge.alpha", "must lie in (0, 1)");
    c.bridge = bc;
  }

  if (j.contains("levels")) {
    if (!j["levels"].is_array() || j["levels"].size() < 2) p.fail("levels", "must be an array of >= 2 grids");
    c.levels.clear();
    for (std::size_t k = 0; k < j["levels"].size(); ++k)
      c.levels.push_back(p.grid(j["levels"][k], "levels[" + std::to_string(k) + "]"));
  }
  for (std::size_t k = 1; k < c.levels.size(); ++k)
    if ((c.levels[k].nx - 1) % (c.levels[0].nx - 1) != 0 || (c.levels[k].nt - 1) % (c.levels[0].nt - 1) != 0)
      p.fail("levels", "every level must contain the coarsest grid's nodes (nx-1, nt-1 multiples)");
  p.number(j, "", "min_order", c.min_order);
  p.positive(j, "", "oracle_tol", c.oracle_tol);
  p.positive(j, "", "dominance_tol", c.dominance_tol);
  p.number(j, "", "exclusion", c.exclusion);
  p.positive(j, "", "comparison_radius", c.comparison_radius);
  p.count(j, "", "output_stride", c.output_stride);
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string() || j["output_dir"].get<std::string>().empty())
      p.fail("output_dir", "must be a non-empty string");
    c.output_dir = j["output_dir"].get<std::string>();
  }

  const std::pair<const char*, bool> required[] = {{"marginals", c.marginals.has_value()},
                                                   {"stopping", c.stopping.has_value()},
                                                   {"bridge", c.bridge.has_value()}};
  const char* need = c.experiment == "schrodinger"     ? "marginals"
                     : c.experiment == "stopping-dist" ? "stopping"
                     : c.experiment == "bridge-test"   ? "bridge"
                                                       : nullptr;
  for (auto [name, present] : required)
    if (need && std::string(need) == name && !present)
      p.fail("", "section '" + std::string(name) + "' is required by experiment '" + c.experiment + "'");
  if ((c.experiment.rfind("sec7", 0) == 0 || c.experiment == "convergence-study") && !is_sec7(c.spec))
    p.fail("spec", "experiment '" + c.experiment + "' compares against the closed form and needs its cost functions");
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const Error& e) {
    throw InvalidArgument(std::string("cannot read config: ") + e.what());
  }
  return parse_experiment_config(text, path.filename().string());
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"experiment", c.experiment},
                   {"spec", to_json(c.spec)},
                   {"grid", {{"nx", c.grid.nx}, {"nt", c.grid.nt}}},
                   {"solver", hjb::to_json(c.solver)},
                   {"min_order", c.min_order},
                   {"oracle_tol", c.oracle_tol},
                   {"dominance_tol", c.dominance_tol},
                   {"exclusion", c.exclusion},
                   {"comparison_radius", c.comparison_radius},
                   {"output_stride", c.output_stride}};
  j["levels"] = nlohmann::json::array();
  for (const auto& l : c.levels) j["levels"].push_back({{"nx", l.nx}, {"nt", l.nt}});
  if (c.sim) j["sim"] = simulate::to_json(*c.sim);
  if (c.marginals) {
    const auto& m = *c.marginals;
    j["marginals"] = {{"mean_init", m.mean_init},
                      {"sd_init", m.sd_init},
                      {"mean_final", m.mean_final},
                      {"sd_final", m.sd_final},
                      {"sinkhorn",
                       {{"tol", m.sinkhorn.tol},
                        {"max_iter", m.sinkhorn.max_iter},
                        {"gauge_index", m.sinkhorn.gauge_index},
                        {"domain", domain_name(m.sinkhorn.domain)}}}};
  }
  if (c.stopping) {
    const auto& s = *c.stopping;
    j["stopping"] = {{"orientation", to_string(s.orientation)},
                     {"threshold", s.threshold},
                     {"t0", std::isnan(s.t0) ? nlohmann::json(nullptr) : nlohmann::json(s.t0)},
                     {"starts", s.starts},
                     {"martingale_x0", s.martingale_x0},
                     {"checkpoints", s.checkpoints},
                     {"sigmas", s.sigmas}};
  }
  if (c.bridge) {
    const auto& b = *c.bridge;
    j["bridge"] = {{"s", b.s},         {"x", b.x},           {"u", b.u},
                   {"z", b.z},         {"t", b.t},           {"hbar", b.hbar},
                   {"n_paths", b.n_paths}, {"n_bins", b.n_bins}, {"seed", b.seed},
                   {"alpha", b.alpha}, {"span_sd", b.span_sd}};
  }
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir.generic_string();
  return j;
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.out && !opts.out->empty()) return *opts.out;
  if (const char* env = std::getenv("BERNSTEIN_OUT_DIR"); env && *env) return env;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return std::filesystem::path("out") / cfg.experiment;
}

// --- comparison -------------------------------------------------------------

namespace {

struct Accumulator {
  double inf = 0.0, sum_sq = 0.0, ref_inf = 0.0, ref_sq = 0.0, max_rel = 0.0;
  double arg_t = 0.0, arg_x = 0.0;
  std::size_t n = 0;

  void add(double t, double x, double a, double b) {
    const double e = std::abs(a - b);
    if (e > inf || n == 0) {
      inf = e;
      arg_t = t;
      arg_x = x;
    }
    sum_sq += e * e;
    ref_inf = std::max(ref_inf, std::abs(b));
    ref_sq += b * b;
    if (b != 0.0) max_rel = std::max(max_rel, e / std::abs(b));
    ++n;
  }

  nlohmann::json json() const {
    if (n == 0) return {{"nodes", 0}};
    const double rms = std::sqrt(sum_sq / double(n)), ref_rms = std::sqrt(ref_sq / double(n));
    return {{"nodes", n},
            {"inf_norm", inf},
            {"scaled_2_norm", rms},
            {"relative_inf_norm", ref_inf > 0 ? inf / ref_inf : 0.0},
            {"relative_scaled_2_norm", ref_rms > 0 ? rms / ref_rms : 0.0},
            {"max_pointwise_relative", max_rel},
            {"argmax", {{"t", arg_t}, {"x", arg_x}}}};
  }
};

}  // namespace

nlohmann::json compare_report(const ScalarField& a, const ScalarField& b, const std::vector<Restriction>& restrictions) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("compare_report: fields live on different grids");
  const auto& g = a.grid();
  Accumulator all;
  std::vector<Accumulator> sub(restrictions.size());
  for (std::size_t n = 0; n < g.nt(); ++n)
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double t = g.t(n), x = g.x(i);
      if (!std::isfinite(a(n, i)) || !std::isfinite(b(n, i)))
        throw NumericalError("compare_report: non-finite value at (" + io::format_double(t) + ", " +
                             io::format_double(x) + ")");
      all.add(t, x, a(n, i), b(n, i));
      for (std::size_t k = 0; k < restrictions.size(); ++k)
        if (restrictions[k].keep(t, x)) sub[k].add(t, x, a(n, i), b(n, i));
    }
  nlohmann::json j = all.json();
  j["restricted"] = nlohmann::json::object();
  for (std::size_t k = 0; k < restrictions.size(); ++k) j["restricted"][restrictions[k].name] = sub[k].json();
  return j;
}

// --- running ----------------------------------------------------------------

namespace {

using Column = std::pair<std::string, std::function<double(std::size_t, std::size_t)>>;

std::vector<std::size_t> strided(std::size_t count, std::size_t stride) {
  std::vector<std::size_t> v;
  for (std::size_t k = 0; k < count; k += stride) v.push_back(k);
  if (v.back() != count - 1) v.push_back(count - 1);
  return v;
}

std::string grid_csv(const SpaceTimeGrid& g, std::size_t stride, const std::vector<Column>& cols) {
  std::vector<std::string> header{"t", "x"};
  for (const auto& c : cols) header.push_back(c.first);
  io::CsvTable table(header);
  const auto rows = strided(g.nt(), stride), nodes = strided(g.nx(), stride);
  std::vector<double> row(header.size());
  for (std::size_t n : rows)
    for (std::size_t i : nodes) {
      row[0] = g.t(n);
      row[1] = g.x(i);
      for (std::size_t k = 0; k < cols.size(); ++k) row[k + 2] = cols[k].second(n, i);
      table.add_row(row);
    }
  return table.str();
}

Column field_column(const std::string& name, const ScalarField& f) {
  return {name, [&f](std::size_t n, std::size_t i) { return f(n, i); }};
}

Column mask_column(const std::string& name, const RegionMask& m) {
  return {name, [&m](std::size_t n, std::size_t i) { return m.stopping(n, i) ? 1.0 : 0.0; }};
}

class Run {
 public:
  Run(const ExperimentConfig& cfg, std::filesystem::path dir, std::function<void(const std::string&)> log)
      : cfg_(cfg), dir_(std::move(dir)), log_(std::move(log)) {}

  void note(const std::string& msg) const {
    if (log_) log_(msg);
  }

  void write(const std::string& name, const std::string& content) {
    io::write_text(dir_ / name, content);
    files_.push_back({{"path", name}, {"sha256", io::sha256_hex(content)}, {"bytes", content.size()}});
  }

  void write_json(const std::string& name, const nlohmann::json& j) { write(name, io::dump_json(j)); }

  void check(const std::string& name, bool pass, double value, double limit, const std::string& relation) {
    checks_.push_back({{"name", name}, {"pass", pass}, {"value", value}, {"limit", limit}, {"relation", relation}});
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %s: %.6g (%s %.3g)", pass ? "PASS" : "FAIL", name.c_str(), value,
                  relation.c_str(), limit);
    note(buf);
  }

  void seed(const std::string& name, std::uint64_t s) { seeds_[name] = s; }

  Manifest finish() {
    bool pass = true;
    for (const auto& c : checks_) pass = pass && c["pass"].get<bool>();
    const auto config = to_json(cfg_);
    nlohmann::json m{{"experiment", cfg_.experiment},
                     {"version", BERNSTEIN_VERSION},
                     {"config", config},
                     {"config_sha256", io::sha256_hex(io::dump_json(config))},
                     {"seeds", seeds_},
                     {"files", files_},
                     {"checks", checks_},
                     {"pass", pass}};
    io::write_text(dir_ / "manifest.json", io::dump_json(m));
    return {m, dir_, pass};
  }

  const ExperimentConfig& cfg() const { return cfg_; }

 private:
  const ExperimentConfig& cfg_;
  std::filesystem::path dir_;
  std::function<void(const std::string&)> log_;
  nlohmann::json files_ = nlohmann::json::array();
  nlohmann::json checks_ = nlohmann::json::array();
  nlohmann::json seeds_ = nlohmann::json::object();
};

double oracle_eta(Orientation o, const ProblemSpec& spec, double t, double x) {
  const double T = 2.0 * spec.half_horizon;
  return o == Orientation::kForward ? analytic::sec7_eta_forward(t, x, spec.hbar, T)
                                    : analytic::sec7_eta_backward(t, x, spec.hbar, T);
}

ScalarField oracle_value(Orientation o, const ProblemSpec& spec, const GridPtr& grid) {
  return ScalarField::from_function(grid, [&](double t, double x) { return -spec.hbar * std::log(oracle_eta(o, spec, t, x)); });
}

std::string boundary_csv(const RegionMask& m) {
  io::CsvTable t({"t", "left", "right"});
  const auto& g = m.grid();
  for (std::size_t n = 0; n < g.nt(); ++n)
    for (const auto& [l, r] : m.stopping_intervals(n)) t.add_row(std::vector<double>{g.t(n), l, r});
  return t.str();
}

void run_sec7(Run& run, Orientation o) {
  const auto& cfg = run.cfg();
  const auto& spec = cfg.spec;
  const auto grid = build_grid(spec, cfg.grid.nx, cfg.grid.nt);
  run.note(std::string("solving ") + to_string(o) + " obstacle problem on " + std::to_string(grid->nx()) + " x " +
           std::to_string(grid->nt()));
  const auto sol = hjb::solve_obstacle(spec, grid, o, cfg.solver);
  const auto val = hjb::value_from_eta(sol, spec.hbar);
  const std::string eta_name = o == Orientation::kForward ? "eta" : "eta_star";
  const std::string u_name = o == Orientation::kForward ? "U" : "U_star";
  const std::string b_name = o == Orientation::kForward ? "b" : "b_star";
  run.write(eta_name + ".csv", grid_csv(*grid, cfg.output_stride,
                                        {field_column(eta_name, sol.eta), field_column("obstacle", sol.obstacle)}));
  run.write("value_drift.csv",
            grid_csv(*grid, cfg.output_stride, {field_column(u_name, val.value), field_column(b_name, val.drift)}));
  run.write("region.csv", grid_csv(*grid, cfg.output_stride, {mask_column("stopping", sol.mask)}));
  run.write("free_boundary.csv", boundary_csv(sol.mask));

  const double lcp = hjb::lcp_residual_norm(sol, spec);
  run.write_json("solve.json", {{"orientation", to_string(o)},
                                {"steps", sol.stats.steps},
                                {"total_sweeps", sol.stats.total_sweeps},
                                {"max_sweeps", sol.stats.max_sweeps},
                                {"max_step_residual", sol.stats.max_step_residual},
                                {"padding_nodes", sol.pad_nodes},
                                {"lcp_residual_scaled", lcp}});
  run.check("complementarity residual", lcp <= 10.0 * cfg.solver.psor_tol, lcp, 10.0 * cfg.solver.psor_tol, "<=");

  run.note("evaluating closed-form oracle");
  const auto oracle = oracle_value(o, spec, grid);
  const double lo = cfg.exclusion, hi = cfg.comparison_radius;
  const auto report = compare_report(val.value, oracle,
                                     {{"annulus", [=](double, double x) { return std::abs(x) >= lo - 1e-12 && std::abs(x) <= hi + 1e-12; }},
                                      {"exclusion", [=](double, double x) { return std::abs(x) >= lo - 1e-12; }}});
  run.write_json("oracle_comparison.json", report);
  const double rel = report["restricted"]["annulus"].value("max_pointwise_relative", 0.0);
  run.check("oracle relative error", rel <= cfg.oracle_tol, rel, cfg.oracle_tol, "<=");

  // The closed-form stopping set is the x = 0 line plus the boundary slice.
  const std::size_t zero = grid->nearest_x(0.0), edge = o == Orientation::kForward ? grid->nt() - 1 : 0;
  if (grid->x(zero) == 0.0) {
    std::size_t wrong = 0;
    for (std::size_t n = 0; n < grid->nt(); ++n)
      for (std::size_t i = 0; i < grid->nx(); ++i)
        if (sol.mask.stopping(n, i) != (n == edge || i == zero)) ++wrong;
    run.check("free boundary misclassified nodes", wrong == 0, double(wrong), 0.0, "==");
  }

  if (cfg.sim) {
    auto sc = *cfg.sim;
    sc.orientation = o;
    run.seed("sim", sc.seed);
    const auto ens = simulate::simulate(spec, val.drift, sol.mask, sc);
    const auto est = simulate::action_estimate(ens);
    const double target = -spec.hbar * std::log(oracle_eta(o, spec, sc.t0, sc.x0));
    run.write_json("mc_value.json", {{"ensemble", ens.summary()}, {"action", simulate::to_json(est)}, {"oracle", target}});
    const double z = est.stderr_ > 0 ? std::abs(est.mean - target) / est.stderr_ : (est.mean == target ? 0.0 : 1e300);
    run.check("Monte Carlo action (standard errors from oracle)", z <= 3.0, z, 3.0, "<=");
  }
}

void run_classical(Run& run) {
  const auto& cfg = run.cfg();
  const auto& spec = cfg.spec;
  const auto grid = build_grid(spec, cfg.grid.nx, cfg.grid.nt);
  nlohmann::json report = nlohmann::json::object();
  for (Orientation o : {Orientation::kForward, Orientation::kBackward}) {
    const std::string tag = to_string(o);
    run.note("solving " + tag + " obstacle and classical problems");
    const auto u = hjb::value_from_eta(hjb::solve_obstacle(spec, grid, o, cfg.solver), spec.hbar);
    const auto h = hjb::classical_value(spec, grid, o, cfg.solver);
    ScalarField diff(grid, RowMatrix(u.value.values() - h.value.values()));
    run.write("classical_" + tag + ".csv",
              grid_csv(*grid, cfg.output_stride,
                       {field_column("U", u.value), field_column("H", h.value), field_column("U_minus_H", diff)}));
    const double dominance = diff.values().maxCoeff();
    const double u01 = interpolate(u.value, 0.0, 1.0), h01 = interpolate(h.value, 0.0, 1.0);
    report[tag] = {{"max_U_minus_H", dominance}, {"U_0_1", u01}, {"H_0_1", h01}, {"gap_0_1", h01 - u01},
                   {"comparison", compare_report(u.value, h.value)}};
    run.check(tag + " dominance max(U - H)", dominance <= cfg.dominance_tol, dominance, cfg.dominance_tol, "<=");
    if (o == Orientation::kForward) {
      const double tol = 20.0 * cfg.solver.psor_tol;
      run.check("forward strict gap H(0,1) - U(0,1)", h01 - u01 > tol, h01 - u01, tol, ">");
    }
  }
  run.write_json("classical_report.json", report);
}

void run_schrodinger(Run& run) {
  const auto& cfg = run.cfg();
  const auto& spec = cfg.spec;
  const auto& mc = *cfg.marginals;
  const auto grid = build_grid(spec, cfg.grid.nx, cfg.grid.nt);
  const auto pi = schrodinger::gaussian_density(*grid, mc.mean_init, mc.sd_init);
  const auto pf = schrodinger::gaussian_density(*grid, mc.mean_final, mc.sd_final);
  const auto m = schrodinger::make_marginals(pi, pf, grid->dx());
  run.note("running Sinkhorn on " + std::to_string(grid->nx()) + " nodes");
  const auto sol = schrodinger::solve_schrodinger(m, grid, spec.hbar, mc.sinkhorn);
  const auto& f = sol.factors;
  const auto drift = schrodinger::drift_from_factors(f, grid, spec.hbar);
  const auto rev = simulate::reversed_drift(drift, sol.rho, spec.hbar);
  ScalarField target = gradient_x(log_field(sol.eta_star));
  target.values() *= -spec.hbar;

  io::CsvTable factors({"x", "p_init", "p_final", "eta_star_init", "eta_final"});
  for (std::size_t i = 0; i < grid->nx(); ++i)
    factors.add_row(std::vector<double>{grid->x(i), m.p_init[i], m.p_final[i], f.eta_star_init[i], f.eta_final[i]});
  run.write("factors.csv", factors.str());
  io::CsvTable trace({"iteration", "marginal_residual"});
  for (std::size_t k = 0; k < f.residual_trace.size(); ++k)
    trace.add_row(std::vector<double>{double(k + 1), f.residual_trace[k]});
  run.write("residual_trace.csv", trace.str());
  run.write("fields.csv", grid_csv(*grid, cfg.output_stride,
                                   {field_column("eta", sol.eta), field_column("eta_star", sol.eta_star),
                                    field_column("rho", sol.rho), field_column("B", drift),
                                    field_column("B_star", rev.drift_star), mask_column("below_floor", rev.undefined)}));
  const auto masses = schrodinger::slice_masses(sol.rho);
  io::CsvTable mass({"t", "mass"});
  double mass_dev = 0.0;
  for (std::size_t n = 0; n < masses.size(); ++n) {
    mass.add_row(std::vector<double>{grid->t(n), masses[n]});
    mass_dev = std::max(mass_dev, std::abs(masses[n] - 1.0));
  }
  run.write("masses.csv", mass.str());

  const auto scaled = schrodinger::rescale_gauge(f, 3.7);
  const auto rho2 = schrodinger::bernstein_density(schrodinger::propagate_eta(scaled, grid, spec.hbar),
                                                   schrodinger::propagate_eta_star(scaled, grid, spec.hbar));
  const double gauge = (rho2.values() - sol.rho.values()).cwiseAbs().maxCoeff() /
                       std::max(1.0, sol.rho.values().cwiseAbs().maxCoeff());
  double diff = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < grid->nt(); ++n)
    for (std::size_t i = 0; i < grid->nx(); ++i)
      if (!rev.undefined.stopping(n, i)) {
        diff = std::max(diff, std::abs(rev.drift_star(n, i) - target(n, i)));
        scale = std::max(scale, std::abs(target(n, i)));
      }
  const double reversal = diff / std::max(1.0, scale);
  run.write_json("schrodinger_report.json", {{"iterations", f.iterations},
                                             {"final_marginal_error", f.final_marginal_error},
                                             {"monotone_residual", f.monotone_residual},
                                             {"log_domain", f.log_domain},
                                             {"gauge_index", f.gauge_index},
                                             {"truncation_init", m.truncation_init},
                                             {"truncation_final", m.truncation_final},
                                             {"max_mass_deviation", mass_dev},
                                             {"gauge_change", gauge},
                                             {"drift_reversal_scaled", reversal},
                                             {"nodes_below_floor", rev.undefined_count}});
  run.check("Sinkhorn marginal residual", f.final_marginal_error <= mc.sinkhorn.tol, f.final_marginal_error,
            mc.sinkhorn.tol, "<=");
  run.check("density mass deviation", mass_dev <= 1e-6, mass_dev, 1e-6, "<=");
  run.check("gauge invariance of rho", gauge <= 1e-12, gauge, 1e-12, "<=");
  run.check("drift reversal identity", reversal <= 1e-3, reversal, 1e-3, "<=");
}

void run_stopping(Run& run) {
  const auto& cfg = run.cfg();
  const auto& spec = cfg.spec;
  const auto& sc = *cfg.stopping;
  const auto grid = build_grid(spec, cfg.grid.nx, cfg.grid.nt);
  const Orientation o = sc.orientation;
  const bool fwd = o == Orientation::kForward;
  run.note(std::string("solving ") + to_string(o) + " obstacle problem");
  const auto sol = hjb::solve_obstacle(spec, grid, o, cfg.solver);
  const auto val = hjb::value_from_eta(sol, spec.hbar);
  run.note("solving survival function");
  const auto q = stopping::solve_q({o, sc.threshold, &val.drift, &sol.mask, spec.hbar});
  run.write("survival.csv", grid_csv(*grid, cfg.output_stride,
                                     {field_column("q", q.q),
                                      {"class", [&q](std::size_t n, std::size_t i) { return double(q.cls(n, i)); }}}));

  simulate::SimConfig base;
  if (cfg.sim) base = *cfg.sim;
  else {
    base.dt = grid->dt();
    base.n_paths = 20000;
  }
  base.orientation = o;
  base.t0 = std::isnan(sc.t0) ? (fwd ? spec.t_begin() : spec.t_end()) : sc.t0;
  base.t_final = sc.threshold;
  run.seed("sim", base.seed);

  io::CsvTable table({"x0", "q_pde", "mc_estimate", "mc_stderr", "standard_errors"});
  for (std::size_t k = 0; k < sc.starts.size(); ++k) {
    auto c = base;
    c.x0 = sc.starts[k];
    c.seed = base.seed + k;
    c.checkpoints.clear();
    const auto e = stopping::empirical_survival(simulate::simulate(spec, val.drift, sol.mask, c), sc.threshold);
    const double pde = q.evaluate(c.t0, c.x0);
    const double z = e.stderr_ > 0 ? std::abs(e.estimate - pde) / e.stderr_ : (std::abs(e.estimate - pde) < 1e-12 ? 0 : 1e300);
    table.add_row(std::vector<double>{c.x0, pde, e.estimate, e.stderr_, z});
    run.check("survival at x0=" + io::format_double(c.x0) + " (standard errors)", z <= sc.sigmas, z, sc.sigmas, "<=");
  }
  run.write("survival_mc.csv", table.str());

  auto c = base;
  c.x0 = sc.martingale_x0;
  c.seed = base.seed + sc.starts.size();
  c.checkpoints = sc.checkpoints;
  if (c.checkpoints.empty())
    for (int k = 1; k <= 4; ++k) c.checkpoints.push_back(c.t0 + (sc.threshold - c.t0) * k / 5.0);
  const auto mart = stopping::martingale_check(q, simulate::simulate(spec, val.drift, sol.mask, c), sc.sigmas);
  run.write_json("martingale.json", stopping::to_json(mart));
  run.check("martingale checkpoints passing", mart.pass, double(std::count_if(mart.checkpoints.begin(), mart.checkpoints.end(),
                                                                            [](const auto& cp) { return cp.within; })),
            double(mart.checkpoints.size()), "==");
}

void run_bridge(Run& run) {
  const auto& b = *run.cfg().bridge;
  run.seed("bridge", b.seed);
  run.note("sampling pinned paths");
  const auto rep = simulate::bridge_markov_test(b);
  io::CsvTable hist({"left", "right", "observed", "expected"});
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rep.observed.size(); ++k) {
    const double l = k == 0 ? -inf : rep.edges[k - 1];
    const double r = k == rep.observed.size() - 1 ? inf : rep.edges[k];
    hist.add_row({io::format_double(l), io::format_double(r), std::to_string(rep.observed[k]),
                  io::format_double(rep.expected[k])});
  }
  run.write("histogram.csv", hist.str());
  run.write_json("bridge_report.json", simulate::to_json(rep));
  run.check("chi-square p-value", rep.pass, rep.p_value, b.alpha, ">=");
}

void run_convergence(Run& run) {
  const auto& cfg = run.cfg();
  const auto& spec = cfg.spec;
  const auto& levels = cfg.levels;
  io::CsvTable table({"orientation", "level", "nx", "nt", "dx", "dt", "max_error", "order"});
  for (Orientation o : {Orientation::kForward, Orientation::kBackward}) {
    const auto coarse = build_grid(spec, levels[0].nx, levels[0].nt);
    const auto oracle = oracle_value(o, spec, coarse);
    double prev = 0.0;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      run.note(std::string(to_string(o)) + " level " + std::to_string(l));
      const auto grid = build_grid(spec, levels[l].nx, levels[l].nt);
      const auto v = hjb::value_from_eta(hjb::solve_obstacle(spec, grid, o, cfg.solver), spec.hbar);
      const std::size_t sx = (levels[l].nx - 1) / (levels[0].nx - 1), st = (levels[l].nt - 1) / (levels[0].nt - 1);
      double err = 0.0;
      for (std::size_t n = 0; n < coarse->nt(); ++n)
        for (std::size_t i = 0; i < coarse->nx(); ++i)
          if (std::abs(coarse->x(i)) >= cfg.exclusion - 1e-12)
            err = std::max(err, std::abs(v.value(n * st, i * sx) - oracle(n, i)));
      std::string order = "";
      if (l > 0) {
        const double ratio_x = double(levels[l].nx - 1) / double(levels[l - 1].nx - 1);
        const double p = std::log(prev / err) / std::log(ratio_x);
        order = io::format_double(p);
        run.check(std::string(to_string(o)) + " order level " + std::to_string(l - 1) + "->" + std::to_string(l),
                  p >= cfg.min_order, p, cfg.min_order, ">=");
      }
      table.add_row({to_string(o), std::to_string(l), std::to_string(levels[l].nx), std::to_string(levels[l].nt),
                     io::format_double(grid->dx()), io::format_double(grid->dt()), io::format_double(err), order});
      prev = err;
    }
  }
  run.write("convergence.csv", table.str());
}

}  // namespace

Manifest run_experiment(ExperimentConfig cfg, const RunOptions& opts) {
  if (opts.seed) {
    if (cfg.sim) cfg.sim->seed = *opts.seed;
    if (cfg.bridge) cfg.bridge->seed = *opts.seed;
    if (cfg.experiment == "stopping-dist" && !cfg.sim) {
      cfg.sim = simulate::SimConfig{};
      cfg.sim->seed = *opts.seed;
      cfg.sim->dt = build_grid(cfg.spec, cfg.grid.nx, cfg.grid.nt)->dt();
      cfg.sim->n_paths = 20000;
    }
  }
  const auto dir = resolve_output_dir(cfg, opts);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw InvalidArgument("output directory " + dir.string() + " is not writable" + (ec ? ": " + ec.message() : ""));
  Run run(cfg, dir, opts.log);
  try {
    const auto& e = cfg.experiment;
    if (e == "sec7-forward") run_sec7(run, Orientation::kForward);
    else if (e == "sec7-backward") run_sec7(run, Orientation::kBackward);
    else if (e == "sec7-classical-compare") run_classical(run);
    else if (e == "schrodinger") run_schrodinger(run);
    else if (e == "stopping-dist") run_stopping(run);
    else if (e == "bridge-test") run_bridge(run);
    else if (e == "convergence-study") run_convergence(run);
    else throw InvalidArgument("unknown experiment '" + e + "'");
  } catch (const ConvergenceError& ex) {
    throw ConvergenceError(cfg.experiment + ": " + ex.what(), ex.trace());
  } catch (const InvalidArgument& ex) {
    throw InvalidArgument(cfg.experiment + ": " + ex.what());
  } catch (const NumericalError& ex) {
    throw NumericalError(cfg.experiment + ": " + ex.what());
  }
  return run.finish();
}

}  // namespace bernstein::experiments
