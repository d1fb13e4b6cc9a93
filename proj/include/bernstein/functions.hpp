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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace bernstein {

/// A named scalar function of position drawn from a fixed registry.
///
/// Functions are configured by name plus optional numeric parameters so that
/// problem definitions stay serializable. Registered names:
///
///   zero                      0
///   constant   {value}        value
///   linear     {scale,center} scale * (x - center)
///   abs        {scale,center} scale * |x - center|
///   log1p_abs  {scale,center} scale * log(1 + |x - center|)
///   quadratic  {scale,center} scale * (x - center)^2
///
/// `scale` defaults to 1 and `center` to 0.
class ScalarFunction {
 public:
  ScalarFunction();  // zero
  ScalarFunction(std::string name, nlohmann::json params);

  double operator()(double x) const { return fn_(x); }

  const std::string& name() const noexcept { return name_; }
  const nlohmann::json& params() const noexcept { return params_; }

  static std::vector<std::string> registered_names();

 private:
  std::string name_;
  nlohmann::json params_;
  std::function<double(double)> fn_;
};

ScalarFunction make_function(std::string_view name,
                             const nlohmann::json& params = nlohmann::json::object());

/// Accepts either a bare name ("abs") or {"name": "abs", "scale": 2}.
ScalarFunction function_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScalarFunction& f);

struct LipschitzReport {
  double max_quotient = 0.0;
  bool within_bound = true;
};

/// Largest |f(x_{k+1}) - f(x_k)| / |x_{k+1} - x_k| over `samples` uniform
/// points of [a, b]. A sampled diagnostic, not a proof.
LipschitzReport sampled_lipschitz(const ScalarFunction& f, double a, double b,
                                  std::size_t samples, double bound);

}  // namespace bernstein
