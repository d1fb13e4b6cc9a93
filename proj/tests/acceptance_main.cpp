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

// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.
// Optional arguments select criteria by number, e.g. `acceptance 2 6`.

#include <cstdlib>
#include <iostream>
#include <string>

#include "bernstein/acceptance.hpp"

int main(int argc, char** argv) {
  bernstein::acceptance::Suite suite;
  bool pass = true;
  auto report = [&](const bernstein::acceptance::CriterionResult& r) {
    std::cout << bernstein::acceptance::format_line(r) << std::endl;
    pass = pass && r.pass;
  };
  if (argc > 1) {
    for (int k = 1; k < argc; ++k) report(suite.run(std::atoi(argv[k])));
  } else {
    suite.run_all(report);
  }
  std::cout << (pass ? "ACCEPTANCE: all criteria pass" : "ACCEPTANCE: FAILURES") << std::endl;
  return pass ? EXIT_SUCCESS : EXIT_FAILURE;
}
