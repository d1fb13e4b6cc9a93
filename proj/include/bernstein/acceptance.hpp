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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "bernstein/hjb.hpp"

namespace bernstein::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  nlohmann::json metrics;
  double seconds = 0.0;
};

/// "PASS  criterion N  title: detail  (seconds)".
std::string format_line(const CriterionResult& r);

struct SuiteOptions {
  std::uint64_t seed = 20261016;
};

/// The ten acceptance criteria. Solutions shared between criteria are
/// computed once and cached.
class Suite {
 public:
  explicit Suite(SuiteOptions opts = {});

  static constexpr int kCount = 10;
  CriterionResult run(int id);

  /// Runs every criterion in order; `sink` sees each result as it finishes.
  std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& sink = {});

 private:
  struct Solved {
    hjb::EtaSolution eta;
    double seconds;
  };
  const Solved& solved(Orientation o, std::size_t nx, std::size_t nt);

  CriterionResult oracle_agreement();
  CriterionResult free_boundary();
  CriterionResult complementarity();
  CriterionResult mc_value();
  CriterionResult survival();
  CriterionResult schrodinger_system();
  CriterionResult drift_reversal();
  CriterionResult bridge();
  CriterionResult classical_comparison();
  CriterionResult convergence();

  SuiteOptions opts_;
  ProblemSpec spec_;
  std::map<std::tuple<int, std::size_t, std::size_t>, std::unique_ptr<Solved>> cache_;
};

}  // namespace bernstein::acceptance
