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

// Experiment runner: config ingestion, solver/simulator pipelines and
// reproducible artifact directories with a hashed manifest.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bernstein/core.hpp"
#include "bernstein/hjb.hpp"
#include "bernstein/schrodinger.hpp"
#include "bernstein/simulate.hpp"

namespace bernstein::experiments {

/// Names accepted in the "experiment" field, in documentation order.
const std::vector<std::string>& experiment_names();

struct GridSize {
  std::size_t nx = 601;
  std::size_t nt = 2001;
};

/// Gaussian endpoint marginals for the "schrodinger" experiment.
struct MarginalsConfig {
  double mean_init = -1.0, sd_init = 0.5;
  double mean_final = 1.0, sd_final = 0.5;
  schrodinger::SinkhornOptions sinkhorn;
};

/// Survival-function study for "stopping-dist".
struct StoppingConfig {
  Orientation orientation = Orientation::kForward;
  double threshold = 0.25;  // T~
  double t0 = std::numeric_limits<double>::quiet_NaN();  // NaN: the orientation's starting edge
  std::vector<double> starts{-1.5, -0.5, 0.3, 1.0, 2.0};
  double martingale_x0 = 1.0;
  std::vector<double> checkpoints;  // empty: four evenly spaced times strictly inside (t0, T~)
  double sigmas = 3.0;
};

struct ExperimentConfig {
  std::string experiment;
  ProblemSpec spec = sec7_spec();
  GridSize grid;
  hjb::SolverConfig solver;
  std::optional<simulate::SimConfig> sim;  // optional Monte Carlo cross-check
  std::optional<MarginalsConfig> marginals;
  std::optional<StoppingConfig> stopping;
  std::optional<simulate::BridgeTestConfig> bridge;
  std::vector<GridSize> levels{{151, 126}, {301, 501}, {601, 2001}};
  double min_order = 1.0;
  double oracle_tol = 1e-2;     // relative error against the closed form
  double dominance_tol = 1e-6;  // max(U - H~) allowed
  double exclusion = 0.1;       // oracle comparisons use |x| >= exclusion
  double comparison_radius = 2.5;
  std::size_t output_stride = 1;  // every k-th node in each direction in field CSVs
  std::filesystem::path output_dir;  // empty: default
};

/// Parses a JSON document. Errors carry the source name, the line, and the
/// dotted field path, e.g. "run.json:7: field 'grid.nx': must be an integer >= 3".
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Fully resolved config (every default spelled out).
nlohmann::json to_json(const ExperimentConfig& cfg);

struct RunOptions {
  std::optional<std::filesystem::path> out;  // beats BERNSTEIN_OUT_DIR and the config
  std::optional<std::uint64_t> seed;         // replaces every seed in the config
  std::function<void(const std::string&)> log;
};

/// --out, then $BERNSTEIN_OUT_DIR, then config, then out/<experiment>.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg, const RunOptions& opts);

struct Manifest {
  nlohmann::json json;
  std::filesystem::path directory;
  bool pass = false;
};

/// Runs the named experiment and writes artifacts plus manifest.json.
Manifest run_experiment(ExperimentConfig cfg, const RunOptions& opts = {});

/// Subset of nodes for a restricted norm.
struct Restriction {
  std::string name;
  std::function<bool(double t, double x)> keep;
};

/// Infinity norm, RMS ("scaled 2-norm"), and their relative forms for a - b,
/// over the whole grid and over each restriction. Throws on grid mismatch.
nlohmann::json compare_report(const ScalarField& a, const ScalarField& b,
                              const std::vector<Restriction>& restrictions = {});

}  // namespace bernstein::experiments
