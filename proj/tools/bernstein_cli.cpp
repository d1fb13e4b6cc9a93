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

// bernstein: experiment runner and acceptance suite.
//
//   bernstein run <config.json> [--out DIR] [--seed N]
//   bernstein <experiment-name> [--config FILE] [--out DIR] [--seed N]
//   bernstein check [--only ID]... [--seed N] [--json FILE]
//   bernstein oracle [--nx N] [--nt N] [--out FILE]
//
// Exit status: 0 all checks pass, 1 a check failed, 2 bad usage or config,
// 3 solver or I/O failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "bernstein/acceptance.hpp"
#include "bernstein/analytic.hpp"
#include "bernstein/errors.hpp"
#include "bernstein/experiments.hpp"
#include "bernstein/io.hpp"

namespace {

using namespace bernstein;

int run_config(experiments::ExperimentConfig cfg, const std::string& out, std::optional<std::uint64_t> seed) {
  experiments::RunOptions opts;
  if (!out.empty()) opts.out = out;
  opts.seed = seed;
  opts.log = [](const std::string& msg) { std::cerr << "  " << msg << "\n"; };
  const auto m = experiments::run_experiment(std::move(cfg), opts);
  std::cout << (m.pass ? "PASS" : "FAIL") << "  " << m.json["experiment"].get<std::string>() << "  -> "
            << (m.directory / "manifest.json").string() << "\n";
  return m.pass ? 0 : 1;
}

int run_check(const std::vector<int>& only, std::uint64_t seed, const std::string& json_path) {
  acceptance::SuiteOptions so;
  so.seed = seed;
  acceptance::Suite suite(so);
  std::vector<acceptance::CriterionResult> results;
  auto print = [](const acceptance::CriterionResult& r) { std::cout << acceptance::format_line(r) << std::endl; };
  if (only.empty()) {
    results = suite.run_all(print);
  } else {
    for (int id : only) {
      results.push_back(suite.run(id));
      print(results.back());
    }
  }
  bool pass = true;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : results) {
    pass = pass && r.pass;
    j.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}, {"metrics", r.metrics}});
  }
  if (!json_path.empty()) io::write_text(json_path, io::dump_json(j));
  std::cout << (pass ? "all criteria pass" : "some criteria FAIL") << "\n";
  return pass ? 0 : 1;
}

int run_oracle(std::size_t nx, std::size_t nt, double hbar, double horizon, double half_width, const std::string& out) {
  const auto grid = build_grid(-half_width, half_width, nx, -horizon / 2, horizon / 2, nt);
  io::CsvTable t({"t", "x", "eta_forward", "eta_backward", "classical_eta", "classical_eta_star"});
  for (std::size_t n = 0; n < grid->nt(); ++n)
    for (std::size_t i = 0; i < grid->nx(); ++i) {
      const double tt = grid->t(n), x = grid->x(i);
      t.add_row(std::vector<double>{tt, x, analytic::sec7_eta_forward(tt, x, hbar, horizon),
                                    analytic::sec7_eta_backward(tt, x, hbar, horizon),
                                    analytic::sec7_classical_eta(tt, x, hbar, horizon),
                                    analytic::sec7_classical_eta_star(tt, x, hbar, horizon)});
    }
  if (out.empty() || out == "-") std::cout << t.str();
  else io::write_text(out, t.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bernstein diffusions: free-boundary HJB solvers, Schrodinger bridges and Monte Carlo checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BERNSTEIN_VERSION);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides BERNSTEIN_OUT_DIR and the config)");
  run->add_option("--seed", seed, "Replace every RNG seed in the config");

  std::vector<std::pair<std::string, CLI::App*>> named;
  for (const auto& name : experiments::experiment_names()) {
    auto* sub = app.add_subcommand(name, "Run '" + name + "' (defaults unless --config is given)");
    sub->add_option("--config", config_path, "Config file; its 'experiment' field must match")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Replace every RNG seed");
    named.emplace_back(name, sub);
  }

  std::vector<int> only;
  std::uint64_t check_seed = acceptance::SuiteOptions{}.seed;
  std::string check_json;
  auto* check = app.add_subcommand("check", "Run the acceptance suite (one line per criterion)");
  check->add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, acceptance::Suite::kCount));
  check->add_option("--seed", check_seed, "Base seed for the Monte Carlo criteria");
  check->add_option("--json", check_json, "Also write the results as JSON");

  std::size_t onx = 61, ont = 11;
  double ohbar = 1.0, ohorizon = 1.0, ohalf = 3.0;
  std::string oout;
  auto* oracle = app.add_subcommand("oracle", "Export closed-form eta tables as CSV");
  oracle->add_option("--nx", onx, "Spatial nodes")->check(CLI::Range(std::size_t(2), std::size_t(100000)));
  oracle->add_option("--nt", ont, "Time nodes")->check(CLI::Range(std::size_t(2), std::size_t(100000)));
  oracle->add_option("--hbar", ohbar, "Diffusion constant")->check(CLI::PositiveNumber);
  oracle->add_option("--horizon", ohorizon, "T")->check(CLI::PositiveNumber);
  oracle->add_option("--half-width", ohalf, "Spatial domain is [-w, w]")->check(CLI::PositiveNumber);
  oracle->add_option("--out", oout, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return run_config(experiments::load_experiment_config(config_path), out_dir, seed);
    for (const auto& [name, sub] : named) {
      if (!*sub) continue;
      experiments::ExperimentConfig cfg;
      if (!config_path.empty()) {
        cfg = experiments::load_experiment_config(config_path);
        if (cfg.experiment != name)
          throw InvalidArgument(config_path + ": config is for '" + cfg.experiment + "', not '" + name + "'");
      } else {
        nlohmann::json j{{"experiment", name}};
        if (name == "schrodinger") j["marginals"] = nlohmann::json::object();
        if (name == "stopping-dist") j["stopping"] = nlohmann::json::object();
        if (name == "bridge-test") j["bridge"] = nlohmann::json::object();
        cfg = experiments::parse_experiment_config(j.dump(), "<defaults>");
      }
      return run_config(std::move(cfg), out_dir, seed);
    }
    if (*check) return run_check(only, check_seed, check_json);
    if (*oracle) return run_oracle(onx, ont, ohbar, ohorizon, ohalf, oout);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
