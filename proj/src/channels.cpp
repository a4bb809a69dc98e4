// Copyright 2026 The qmetro Authors
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

#include "qmetro/channels.hpp"

#include <array>
#include <utility>

namespace qmetro {

namespace {
constexpr std::array<std::pair<Scenario, std::string_view>, 4> kScenarioNames = {{
    {Scenario::parallel_dephasing_1q, "parallel-dephasing-1q"},
    {Scenario::parallel_dephasing_2q, "parallel-dephasing-2q"},
    {Scenario::transverse_dephasing, "transverse-dephasing"},
    {Scenario::amplitude_damping, "amplitude-damping"},
}};
}  // namespace

std::string_view scenario_name(Scenario s) {
  for (const auto& [value, name] : kScenarioNames) {
    if (value == s) return name;
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (const auto& [value, n] : kScenarioNames) {
    if (n == name) return value;
  }
  return std::nullopt;
}

std::string scenario_names() {
  std::string out;
  for (const auto& [value, name] : kScenarioNames) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

ScenarioRates default_rates(Scenario s) {
  switch (s) {
    case Scenario::parallel_dephasing_1q:
      return {10.0, 0.0, 0.0};
    case Scenario::parallel_dephasing_2q:
      return {10.0, 10.0, 0.0};
    case Scenario::transverse_dephasing:
      return {0.1, 0.0, 0.0};
    case Scenario::amplitude_damping:
      return {0.2, 0.0, 0.0};
  }
  return {};
}

int scenario_qubits(Scenario s) { return s == Scenario::parallel_dephasing_2q ? 2 : 1; }

EncodingModel<double> make_model(Scenario s, double omega0, const ScenarioRates& rates) {
  EncodingModel<double> m;
  m.n_qubits = scenario_qubits(s);
  m.omega0 = omega0;
  m.drift_generator = frequency_generator<double>(m.n_qubits);
  switch (s) {
    case Scenario::parallel_dephasing_1q:
      m.control_hams = transverse_controls<double>(1);
      m.channel = parallel_dephasing(rates.gamma);
      break;
    case Scenario::parallel_dephasing_2q:
      m.control_hams = transverse_controls<double>(2);
      m.channel = two_qubit_uncorrelated_dephasing(rates.gamma, rates.gamma2);
      break;
    case Scenario::transverse_dephasing:
      m.control_hams = longitudinal_controls<double>();
      m.channel = transverse_dephasing(rates.gamma);
      break;
    case Scenario::amplitude_damping:
      m.control_hams = transverse_controls<double>(1);
      m.channel = amplitude_damping(rates.gamma, rates.gamma_plus);
      break;
  }
  m.validate();
  return m;
}

}  // namespace qmetro
