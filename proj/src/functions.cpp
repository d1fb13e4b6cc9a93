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

#include "bernstein/functions.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "bernstein/errors.hpp"

namespace bernstein {
namespace {

using Factory = std::function<std::function<double(double)>(const nlohmann::json&)>;

double param(const nlohmann::json& p, const char* key, double fallback) {
  if (!p.is_object() || !p.contains(key)) return fallback;
  const auto& v = p.at(key);
  if (!v.is_number()) {
    throw InvalidArgument(std::string("function parameter '") + key + "' must be a number");
  }
  return v.get<double>();
}

const std::map<std::string, Factory, std::less<>>& registry() {
  static const std::map<std::string, Factory, std::less<>> r = {
      {"zero", [](const nlohmann::json&) { return [](double) { return 0.0; }; }},
      {"constant",
       [](const nlohmann::json& p) {
         double c = param(p, "value", 0.0);
         return [c](double) { return c; };
       }},
      {"linear",
       [](const nlohmann::json& p) {
         double a = param(p, "scale", 1.0), c = param(p, "center", 0.0);
         return [a, c](double x) { return a * (x - c); };
       }},
      {"abs",
       [](const nlohmann::json& p) {
         double a = param(p, "scale", 1.0), c = param(p, "center", 0.0);
         return [a, c](double x) { return a * std::abs(x - c); };
       }},
      {"log1p_abs",
       [](const nlohmann::json& p) {
         double a = param(p, "scale", 1.0), c = param(p, "center", 0.0);
         return [a, c](double x) { return a * std::log1p(std::abs(x - c)); };
       }},
      {"quadratic",
       [](const nlohmann::json& p) {
         double a = param(p, "scale", 1.0), c = param(p, "center", 0.0);
         return [a, c](double x) { return a * (x - c) * (x - c); };
       }},
  };
  return r;
}

}  // namespace

ScalarFunction::ScalarFunction() : ScalarFunction("zero", nlohmann::json::object()) {}

ScalarFunction::ScalarFunction(std::string name, nlohmann::json params)
    : name_(std::move(name)), params_(std::move(params)) {
  if (params_.is_null()) params_ = nlohmann::json::object();
  const auto& r = registry();
  auto it = r.find(name_);
  if (it == r.end()) {
    std::string valid;
    for (const auto& n : registered_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown function '" + name_ + "' (valid: " + valid + ")");
  }
  fn_ = it->second(params_);
}

std::vector<std::string> ScalarFunction::registered_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

ScalarFunction make_function(std::string_view name, const nlohmann::json& params) {
  return ScalarFunction(std::string(name), params);
}

ScalarFunction function_from_json(const nlohmann::json& j) {
  if (j.is_string()) return make_function(j.get<std::string>());
  if (j.is_object() && j.contains("name") && j.at("name").is_string()) {
    nlohmann::json params = j;
    params.erase("name");
    return make_function(j.at("name").get<std::string>(), params);
  }
  throw InvalidArgument("function must be a name or an object with a 'name' field");
}

nlohmann::json to_json(const ScalarFunction& f) {
  nlohmann::json j = f.params();
  j["name"] = f.name();
  return j;
}

LipschitzReport sampled_lipschitz(const ScalarFunction& f, double a, double b,
                                  std::size_t samples, double bound) {
  if (!(b > a) || samples < 2) throw InvalidArgument("sampled_lipschitz: need a < b and samples >= 2");
  LipschitzReport report;
  const double h = (b - a) / static_cast<double>(samples - 1);
  double prev = f(a);
  for (std::size_t k = 1; k < samples; ++k) {
    double cur = f(a + h * static_cast<double>(k));
    if (!std::isfinite(cur)) {
      report.max_quotient = std::numeric_limits<double>::infinity();
      break;
    }
    report.max_quotient = std::max(report.max_quotient, std::abs(cur - prev) / h);
    prev = cur;
  }
  report.within_bound = report.max_quotient <= bound;
  return report;
}

}  // namespace bernstein
