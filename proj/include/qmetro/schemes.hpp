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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmetro/channels.hpp"
#include "qmetro/metrology.hpp"
#include "qmetro/optimizer.hpp"
#include "qmetro/propagation.hpp"

namespace qmetro {

enum class Scheme { standard, ancilla, theoretical_optimal, control_enhanced };

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);
std::string scheme_names();

/// `standard` resolves to |+> for one qubit and (|0..0> + |1..1>)/sqrt(2)
/// otherwise, i.e. the probe of the standard scheme.
enum class Probe { standard, plus, ghz, bell_with_ancilla, random_seeded };

std::string_view probe_name(Probe p);
std::optional<Probe> parse_probe(std::string_view name);
std::string probe_names();

DensityMatrix<double> make_probe(Probe probe, int n_qubits, std::uint64_t seed);

struct SchemeConfig {
  Scheme scheme = Scheme::standard;
  Scenario scenario = Scenario::parallel_dephasing_1q;
  ScenarioRates rates = default_rates(Scenario::parallel_dephasing_1q);
  double omega0 = 2.0 * 3.14159265358979323846;
  std::vector<double> time_grid;
  int slices = 20;
  Probe probe = Probe::standard;
  /// Box bound on every amplitude; 0 selects 20 * |omega0|.
  double u_max = 0.0;
  OptimizerOptions optimizer;
  bool warm_start = false;
  std::uint64_t seed = 0;
  /// Central-difference step; 0 selects default_derivative_step(omega0).
  double derivative_step = 0.0;
  double gamma_c = 1.0;

  double resolved_u_max() const;
  double resolved_derivative_step() const;
  void validate() const;
};

/// Optimizer defaults tied to the amplitude bound: initial step 0.05 u_max,
/// x_tol 1e-6 u_max, f_tol 1e-8, 200 n evaluations.
OptimizerOptions default_control_optimizer(double u_max);

struct MetrologyResult {
  Scheme scheme = Scheme::standard;
  double T = 0.0;
  double qfi = 0.0;
  double sensitivity = 0.0;
  ControlSchedule<double> schedule;
  long evals = 0;
  std::uint64_t seed = 0;
  bool converged = true;
};

std::vector<MetrologyResult> run_standard(const SchemeConfig& config);
std::vector<MetrologyResult> run_ancilla_assisted(const SchemeConfig& config);
std::vector<MetrologyResult> run_theoretical_optimal(const SchemeConfig& config);
std::vector<MetrologyResult> run_control_enhanced(const SchemeConfig& config);

/// Dispatches on config.scheme.
std::vector<MetrologyResult> run_scheme(const SchemeConfig& config);

/// Noise model and probe a scheme evaluates, after ancilla extension.
struct SchemeSetup {
  EncodingModel<double> model;
  DensityMatrix<double> probe;
};
SchemeSetup scheme_setup(const SchemeConfig& config);

}  // namespace qmetro
