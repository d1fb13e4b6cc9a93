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

#include <cmath>

#include "bernstein/errors.hpp"
#include "bernstein/functions.hpp"

using namespace bernstein;

TEST_CASE("registered functions evaluate with their parameters") {
  CHECK(make_function("zero")(3.0) == 0.0);
  CHECK(make_function("constant", {{"value", 2.5}})(-7.0) == 2.5);
  CHECK(make_function("abs", {{"scale", 2.0}, {"center", 1.0}})(-1.0) == 4.0);
  CHECK(make_function("log1p_abs")(-1.0) == doctest::Approx(std::log(2.0)));
  CHECK(make_function("quadratic", {{"center", 1.0}})(3.0) == 4.0);
  CHECK(make_function("linear", {{"scale", -1.0}})(2.0) == -2.0);
}

TEST_CASE("unknown names list the valid choices") {
  try {
    make_function("cosh");
    FAIL("expected an exception");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("log1p_abs") != std::string::npos);
  }
}

TEST_CASE("JSON forms: bare name and object") {
  CHECK(function_from_json("abs")(-2.0) == 2.0);
  const auto f = function_from_json({{"name", "constant"}, {"value", 4.0}});
  CHECK(f(0.0) == 4.0);
  CHECK(function_from_json(to_json(f))(1.0) == 4.0);
  CHECK_THROWS_AS(function_from_json(3.0), InvalidArgument);
  CHECK_THROWS_AS(function_from_json({{"name", "constant"}, {"value", "x"}}), InvalidArgument);
}

TEST_CASE("sampled Lipschitz quotient") {
  const auto r = sampled_lipschitz(make_function("abs", {{"scale", 3.0}}), -1.0, 1.0, 101, 10.0);
  CHECK(r.max_quotient == doctest::Approx(3.0));
  CHECK(r.within_bound);
  CHECK_FALSE(sampled_lipschitz(make_function("quadratic"), -100.0, 100.0, 101, 10.0).within_bound);
}
