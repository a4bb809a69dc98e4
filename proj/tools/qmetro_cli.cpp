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

// qmetro: command-line driver.
//
//   qmetro run --config <path> [--out <path>] [--seed N] [--plot-data]
//   qmetro t2 --linewidth-hz X
//   qmetro nmr --config <path> [--out <path>] [--seed N]
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qmetro/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool plot_data = false;
};

qmetro::RunConfig load(const Overrides& o, qmetro::RunMode mode) {
  qmetro::RunConfig c = qmetro::load_run_config_file(o.config_path, mode);
  if (!o.out.empty()) c.output = o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.plot_data) c.plot_data = true;
  return c;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw qmetro::ConfigError("cannot open output file '" + path + "'");
  return f;
}

int run_command(const Overrides& o) {
  const qmetro::RunConfig config = load(o, qmetro::RunMode::experiment);
  const qmetro::ExperimentOutput out = qmetro::run_experiment(config);
  auto f = open_output(config.output);
  qmetro::write_experiment_csv(f, out);
  std::cerr << "wrote " << out.rows.size() << " rows to " << config.output << '\n';
  if (config.plot_data) {
    for (const auto& p : qmetro::write_plot_data(out, config.output)) {
      std::cerr << "wrote " << p << '\n';
    }
  }
  return 0;
}

int nmr_command(const Overrides& o) {
  const qmetro::RunConfig config = load(o, qmetro::RunMode::nmr);
  const qmetro::NmrOutput out = qmetro::run_nmr_protocol(config);
  auto f = open_output(config.output);
  qmetro::write_nmr_csv(f, out);
  std::cerr << "wrote " << out.rows.size() << " rows to " << config.output << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Control-enhanced frequency estimation under Markovian noise"};
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "Run metrology schemes over a time grid");
  run->add_option("--config", run_opts.config_path, "Configuration file")->required();
  run->add_option("--out", run_opts.out, "Output CSV path (overrides [run] output)");
  run->add_option("--seed", run_opts.seed, "Master seed (overrides [run] seed)");
  run->add_flag("--plot-data", run_opts.plot_data, "Also write two-column data files");

  double linewidth = 0.0;
  auto* t2 = app.add_subcommand("t2", "Coherence time from a spectral linewidth");
  t2->add_option("--linewidth-hz", linewidth, "Full width at half height (Hz)")->required();

  Overrides nmr_opts;
  auto* nmr = app.add_subcommand("nmr", "Standard vs control-enhanced NMR protocol");
  nmr->add_option("--config", nmr_opts.config_path, "Configuration file")->required();
  nmr->add_option("--out", nmr_opts.out, "Output CSV path (overrides [run] output)");
  nmr->add_option("--seed", nmr_opts.seed, "Master seed (overrides [run] seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return run_command(run_opts);
    if (*nmr) return nmr_command(nmr_opts);
    if (*t2) {
      std::cout << qmetro::format_double(qmetro::t2_from_linewidth(linewidth)) << '\n';
      return 0;
    }
  } catch (const qmetro::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qmetro::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
