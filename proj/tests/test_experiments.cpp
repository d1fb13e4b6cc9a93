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

#include <cstdlib>
#include <filesystem>

#include "bernstein/errors.hpp"
#include "bernstein/experiments.hpp"
#include "bernstein/io.hpp"

using namespace bernstein;
using namespace bernstein::experiments;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("bernstein_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string error_of(const std::string& text) {
  try {
    parse_experiment_config(text, "cfg.json");
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config errors name the line, the field and the valid choices") {
  const auto unknown = error_of("{\n  \"experiment\": \"sec7-sideways\"\n}");
  CHECK(unknown.find("cfg.json:2") != std::string::npos);
  CHECK(unknown.find("sec7-sideways") != std::string::npos);
  for (const auto& n : experiment_names()) CHECK(unknown.find(n) != std::string::npos);
  const auto field = error_of("{\"experiment\": \"sec7-forward\",\n \"grid\": {\n  \"nx\": 2}}");
  CHECK(field.find("cfg.json:3") != std::string::npos);
  CHECK(field.find("grid.nx") != std::string::npos);
  CHECK(error_of("{\"experiment\": \"sec7-forward\", \"gird\": {}}").find("unknown field") != std::string::npos);
  CHECK(error_of("{\"experiment\": \"sec7-forward\",\n\n oops}").find("cfg.json:3: syntax error") != std::string::npos);
  CHECK(error_of("{\"experiment\": \"bridge-test\"}").find("'bridge' is required") != std::string::npos);
  CHECK(error_of("{\"experiment\": \"sec7-forward\", \"solver\": {\"psor_omega\": 3}}").find("field 'solver'") !=
        std::string::npos);
  CHECK(error_of("{\"experiment\": \"sec7-forward\", \"spec\": {\"terminal_cost\": \"quadratic\"}}")
            .find("closed form") != std::string::npos);
  CHECK(error_of("{\"experiment\": \"convergence-study\", \"levels\": [{\"nx\": 11, \"nt\": 5}, {\"nx\": 20, \"nt\": 9}]}")
            .find("levels") != std::string::npos);
}

TEST_CASE("defaults are complete and round-trip") {
  const auto c = parse_experiment_config("{\"experiment\": \"sec7-forward\"}");
  CHECK(c.grid.nx == 601);
  CHECK(c.grid.nt == 2001);
  const auto j = to_json(c);
  CHECK(j.contains("solver"));
  CHECK(j["spec"]["terminal_cost"]["name"] == "abs");
  CHECK(to_json(parse_experiment_config(j.dump())) == j);
}

TEST_CASE("output directory precedence: flag, environment, config, default") {
  auto c = parse_experiment_config("{\"experiment\": \"bridge-test\", \"bridge\": {}, \"output_dir\": \"cfgdir\"}");
  RunOptions o;
  ::unsetenv("BERNSTEIN_OUT_DIR");
  CHECK(resolve_output_dir(c, o) == "cfgdir");
  ::setenv("BERNSTEIN_OUT_DIR", "envdir", 1);
  CHECK(resolve_output_dir(c, o) == "envdir");
  o.out = "flagdir";
  CHECK(resolve_output_dir(c, o) == "flagdir");
  ::unsetenv("BERNSTEIN_OUT_DIR");
  c.output_dir.clear();
  CHECK(resolve_output_dir(c, {}) == std::filesystem::path("out") / "bridge-test");
}

TEST_CASE("compare_report norms") {
  const auto g = build_grid(-1.0, 1.0, 5, 0.0, 1.0, 3);
  const ScalarField a(g, 2.0);
  const auto zero = compare_report(a, a);
  CHECK(zero["inf_norm"] == 0.0);
  CHECK(zero["scaled_2_norm"] == 0.0);
  ScalarField b(g, 1.0);
  const auto one = compare_report(a, b, {{"right", [](double, double x) { return x > 0; }}});
  CHECK(one["inf_norm"] == 1.0);
  CHECK(one["scaled_2_norm"] == 1.0);
  CHECK(one["relative_inf_norm"] == 1.0);
  CHECK(one["restricted"]["right"]["nodes"] == 6);
  const auto other = build_grid(-1.0, 1.0, 7, 0.0, 1.0, 3);
  CHECK_THROWS_AS(compare_report(a, ScalarField(other, 1.0)), InvalidArgument);
}

TEST_CASE("sec7-forward on a small grid: manifest, hashes, reruns") {
  const auto cfg = parse_experiment_config(
      "{\"experiment\": \"sec7-forward\", \"grid\": {\"nx\": 121, \"nt\": 201}, \"output_stride\": 4,"
      " \"oracle_tol\": 2e-2, \"sim\": {\"dt\": 5e-3, \"n_paths\": 4000, \"seed\": 3}}");
  const auto dir = scratch("fwd");
  RunOptions o;
  o.out = dir;
  const auto m = run_experiment(cfg, o);
  CHECK(m.pass);
  std::set<std::string> names;
  for (const auto& f : m.json["files"]) {
    names.insert(f["path"].get<std::string>());
    CHECK(io::sha256_hex(io::read_text(dir / f["path"].get<std::string>())) == f["sha256"]);
  }
  for (const char* want : {"eta.csv", "value_drift.csv", "free_boundary.csv", "oracle_comparison.json", "region.csv"})
    CHECK(names.count(want) == 1);
  CHECK(m.json["seeds"]["sim"] == 3);
  CHECK(m.json["config_sha256"].get<std::string>().size() == 64);
  const auto dir2 = scratch("fwd2");
  o.out = dir2;
  const auto m2 = run_experiment(cfg, o);
  CHECK(io::read_text(dir / "manifest.json") == io::read_text(dir2 / "manifest.json"));
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("classical comparison reports dominance") {
  const auto cfg = parse_experiment_config(
      "{\"experiment\": \"sec7-classical-compare\", \"grid\": {\"nx\": 121, \"nt\": 101}, \"output_stride\": 10}");
  const auto dir = scratch("classical");
  RunOptions o;
  o.out = dir;
  const auto m = run_experiment(cfg, o);
  CHECK(m.pass);
  const auto rep = nlohmann::json::parse(io::read_text(dir / "classical_report.json"));
  CHECK(rep["forward"]["max_U_minus_H"].get<double>() <= 1e-6);
  CHECK(rep["forward"]["gap_0_1"].get<double>() > 0.05);
  std::filesystem::remove_all(dir);
}

TEST_CASE("schrodinger, bridge, stopping and convergence experiments run") {
  RunOptions o;
  const auto dir = scratch("misc");
  o.out = dir / "s";
  CHECK(run_experiment(parse_experiment_config("{\"experiment\": \"schrodinger\", \"marginals\": {},"
                                               " \"spec\": {\"x_min\": -5, \"x_max\": 5},"
                                               " \"grid\": {\"nx\": 201, \"nt\": 21}}"),
                       o)
            .pass);
  o.out = dir / "b";
  o.seed = 9;
  const auto b = run_experiment(
      parse_experiment_config("{\"experiment\": \"bridge-test\", \"bridge\": {\"n_paths\": 20000, \"n_bins\": 20, \"span_sd\": 3}}"), o);
  CHECK(b.json["seeds"]["bridge"] == 9);
  o.seed.reset();
  o.out = dir / "q";
  CHECK(run_experiment(parse_experiment_config("{\"experiment\": \"stopping-dist\", \"grid\": {\"nx\": 121, \"nt\": 101},"
                                               " \"stopping\": {\"starts\": [1.0]},"
                                               " \"sim\": {\"dt\": 0.01, \"n_paths\": 4000}}"),
                       o)
            .pass);
  o.out = dir / "c";
  const auto c = run_experiment(
      parse_experiment_config("{\"experiment\": \"convergence-study\","
                              " \"levels\": [{\"nx\": 61, \"nt\": 26}, {\"nx\": 121, \"nt\": 101}]}"),
      o);
  CHECK(c.pass);
  CHECK(c.json["checks"].size() == 2);
  std::filesystem::remove_all(dir);
}
