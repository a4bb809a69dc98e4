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

// Experiment orchestration: configuration files, scheme runs over time grids,
// the NMR-style protocol, and CSV output.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmetro/schemes.hpp"

namespace qmetro {

/// Parsed `key = value` text with `[section]` headers. `#` starts a comment.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text);

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
  /// Every (section, key) pair in file order.
  const std::vector<std::pair<std::string, std::string>>& keys() const { return order_; }

 private:
  std::map<std::pair<std::string, std::string>, std::string> values_;
  std::vector<std::pair<std::string, std::string>> order_;
};

enum class RunMode { experiment, nmr };

struct TimeGridSpec {
  double start = 0.0;
  double stop = 0.0;
  int points = 0;
  bool log_spacing = true;
  std::vector<double> values;  // explicit list; overrides start/stop/points

  std::vector<double> build() const;
};

struct NmrSettings {
  double linewidth_hz = 2.13;
  double min_t_over_t2 = 0.25;
  double max_t_over_t2 = 2.5;
  int points = 10;
  double fidelity_step = 2.0 * 3.14159265358979323846;
  Probe standard_probe = Probe::plus;
  Probe control_probe = Probe::random_seeded;
};

/// Fully resolved run description; every default is explicit after loading.
struct RunConfig {
  RunMode mode = RunMode::experiment;
  Scenario scenario = Scenario::parallel_dephasing_1q;
  ScenarioRates rates;
  double omega0 = 0.0;
  std::vector<Scheme> schemes;
  TimeGridSpec grid;
  int slices = 20;
  double u_max = 0.0;
  Probe probe = Probe::standard;
  bool warm_start = false;
  double derivative_step = 0.0;
  double gamma_c = 1.0;
  OptimizerOptions optimizer;
  std::uint64_t seed = 0;
  std::string output;
  bool plot_data = false;
  NmrSettings nmr;

  std::vector<double> time_grid() const { return grid.build(); }
  SchemeConfig scheme_config(Scheme scheme) const;
  /// T2 implied by the NMR linewidth.
  double t2() const;
};

/// Parses and resolves a configuration. A results file written by this
/// library is accepted as well: its echoed configuration block is used.
/// Throws ConfigError.
RunConfig load_run_config(std::string_view text, RunMode mode);
RunConfig load_run_config_file(const std::string& path, RunMode mode);

/// Resolved configuration as config-file text.
std::string render_config(const RunConfig& config);

/// Default time grid per scenario: 30 log-spaced points over
/// [0.1/gamma, 5/gamma] (4/gamma for transverse dephasing).
TimeGridSpec default_time_grid(Scenario scenario, const ScenarioRates& rates);

/// T2 = 1 / (pi * linewidth).
double t2_from_linewidth(double linewidth_hz);

struct ExperimentOutput {
  RunConfig config;
  std::vector<MetrologyResult> rows;  // scheme order of config.schemes, then T
};

ExperimentOutput run_experiment(const RunConfig& config);

struct NmrRow {
  Scheme scheme = Scheme::standard;
  double T = 0.0;
  double t_over_t2 = 0.0;
  double qfi_theo = 0.0;
  double qfi_fidelity = 0.0;
  long evals = 0;
  std::uint64_t seed = 0;
  bool converged = true;
  ControlSchedule<double> schedule;
};

struct NmrOutput {
  RunConfig config;
  DensityMatrix<double> control_probe;
  std::vector<NmrRow> rows;
};

NmrOutput run_nmr_protocol(const RunConfig& config);

inline constexpr std::string_view kCsvHeader = "scheme,T_s,qfi_s2,sensitivity,evals,seed,converged";
inline constexpr std::string_view kNmrCsvHeader =
    "scheme,T_s,T_over_T2,qfi_theo_s2,qfi_fidelity_s2,evals,seed,converged";
inline constexpr std::string_view kConfigBanner = "# qmetro resolved config";
inline constexpr std::string_view kConfigEnd = "# end config";

/// %.17g formatting (round-trip exact for doubles).
std::string format_double(double v);

void write_experiment_csv(std::ostream& os, const ExperimentOutput& out);
void write_nmr_csv(std::ostream& os, const NmrOutput& out);

/// Two-column `T value` files, one per scheme and quantity, next to `output`.
std::vector<std::string> write_plot_data(const ExperimentOutput& out, const std::string& output);

}  // namespace qmetro
