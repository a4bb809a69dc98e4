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

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "qmetro/harness.hpp"

using namespace qmetro;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig = R"(# small amplitude-damping comparison
[scenario]
name = amplitude-damping
gamma = 0.2
omega0 = 6.283185307179586

[schemes]
run = standard, ancilla, control_enhanced

[time_grid]
start = 1
stop = 10
points = 3
spacing = linear

[control]
slices = 2

[optimizer]
restarts = 2
max_evals = 120

[run]
seed = 17
)";

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "qmetro_harness_test";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QMETRO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_csv(const ExperimentOutput& out) {
  std::ostringstream os;
  write_experiment_csv(os, out);
  return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto f = ConfigFile::parse("[scenario]\nname = x  # trailing\n\n[run]\nseed=3\n");
  CHECK(f.get("scenario", "name") == "x");
  CHECK(f.get("run", "seed") == "3");
  CHECK(f.keys().size() == 2);

  CHECK_THROWS_AS(ConfigFile::parse("[nope]\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("[run]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("seed = 1\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("[run]\nseed\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("[run]\nseed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("[run\n"), ConfigError);
}

TEST_CASE("config resolution and defaults") {
  const auto c = load_run_config("[scenario]\nname = parallel-dephasing-1q\n", RunMode::experiment);
  CHECK(c.rates.gamma == 10.0);
  CHECK(c.omega0 == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(c.slices == 20);
  CHECK(c.u_max == doctest::Approx(40.0 * std::numbers::pi));
  CHECK(c.optimizer.max_evals == 200 * 20 * 2);
  CHECK(c.schemes == std::vector<Scheme>{Scheme::standard, Scheme::ancilla,
                                         Scheme::control_enhanced});
  const auto grid = c.time_grid();
  REQUIRE(grid.size() == 30);
  CHECK(grid.front() == doctest::Approx(0.01));
  CHECK(grid.back() == doctest::Approx(0.5));

  const auto t = load_run_config("[scenario]\nname = transverse-dephasing\n", RunMode::experiment);
  CHECK(t.rates.gamma == 0.1);
  CHECK(t.schemes.size() == 4);
  CHECK(t.time_grid().back() == doctest::Approx(40.0));

  const auto two = load_run_config("[scenario]\nname = parallel-dephasing-2q\n",
                                   RunMode::experiment);
  CHECK(two.schemes == std::vector<Scheme>{Scheme::standard, Scheme::control_enhanced});
}

TEST_CASE("config errors name the valid set") {
  try {
    load_run_config("[scenario]\nname = bit-flip\n", RunMode::experiment);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("amplitude-damping") != std::string::npos);
  }
  try {
    load_run_config("[scenario]\nname = amplitude-damping\n[schemes]\nrun = magic\n",
                    RunMode::experiment);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("control_enhanced") != std::string::npos);
  }
  CHECK_THROWS_AS(load_run_config("[scenario]\nname = parallel-dephasing-2q\n[schemes]\n"
                                  "run = ancilla\n",
                                  RunMode::experiment),
                  ConfigError);
  CHECK_THROWS_AS(load_run_config("[scenario]\nname = amplitude-damping\n[time_grid]\n"
                                  "values = 2, 1\n",
                                  RunMode::experiment),
                  ConfigError);
  CHECK_THROWS_AS(load_run_config("[scenario]\nname = amplitude-damping\n[control]\n"
                                  "slices = many\n",
                                  RunMode::experiment),
                  ConfigError);
  CHECK_THROWS_AS(load_run_config("[scenario]\n", RunMode::experiment), ConfigError);
}

TEST_CASE("t2 from linewidth") {
  CHECK(t2_from_linewidth(2.13) == doctest::Approx(0.149).epsilon(2e-3));
  CHECK(t2_from_linewidth(1.0 / std::numbers::pi) == doctest::Approx(1.0));
  CHECK(t2_from_linewidth(4.26) == doctest::Approx(t2_from_linewidth(2.13) / 2.0));
  CHECK_THROWS_AS(t2_from_linewidth(0.0), std::invalid_argument);
  CHECK_THROWS_AS(t2_from_linewidth(-1.0), std::invalid_argument);
}

TEST_CASE("experiment output and bitwise re-run from the echoed config") {
  const RunConfig config = load_run_config(kSmallConfig, RunMode::experiment);
  const auto out = run_experiment(config);
  CHECK(out.rows.size() == config.time_grid().size() * config.schemes.size());

  const std::string csv = write_csv(out);
  CHECK(csv.rfind(std::string(kConfigBanner), 0) == 0);
  std::istringstream lines(csv);
  std::string line;
  int data_rows = 0;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line == kCsvHeader) {
      header_seen = true;
      continue;
    }
    if (header_seen) ++data_rows;
  }
  CHECK(header_seen);
  CHECK(data_rows == 9);

  const RunConfig echoed = load_run_config(csv, RunMode::experiment);
  CHECK(render_config(echoed) == render_config(config));
  CHECK(write_csv(run_experiment(echoed)) == csv);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.283185307179586, 1e-300, 12345.678901234567}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("plot data files") {
  const RunConfig config = load_run_config(kSmallConfig, RunMode::experiment);
  RunConfig c = config;
  c.schemes = {Scheme::standard};
  const auto out = run_experiment(c);
  const auto files = write_plot_data(out, (scratch_dir() / "fig.csv").string());
  REQUIRE(files.size() == 2);
  CHECK(fs::path(files[0]).filename() == "fig.standard.qfi.dat");
  std::ifstream in(files[0]);
  std::string header;
  std::getline(in, header);
  double t = 0, q = 0;
  int n = 0;
  while (in >> t >> q) ++n;
  CHECK(n == 3);
}

TEST_CASE("nmr protocol") {
  const RunConfig config = load_run_config(
      "[nmr]\npoints = 3\n[optimizer]\nrestarts = 1\nmax_evals = 60\n[run]\nseed = 5\n",
      RunMode::nmr);
  CHECK(config.slices == 5);
  CHECK(config.omega0 == doctest::Approx(120.0 * std::numbers::pi));
  CHECK(config.rates.gamma == doctest::Approx(1.0 / t2_from_linewidth(2.13)));
  CHECK(config.nmr.fidelity_step == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(config.optimizer.max_evals == 60);
  const auto grid = config.time_grid();
  REQUIRE(grid.size() == 3);
  CHECK(grid.back() == doctest::Approx(2.5 * config.t2()));

  const auto out = run_nmr_protocol(config);
  REQUIRE(out.rows.size() == 6);
  for (const auto& r : out.rows) {
    CHECK(r.schedule.slices() == 5);
    CHECK(r.schedule.amplitudes().size() == 10);
    CHECK(r.qfi_theo > 0.0);
    CHECK(r.qfi_fidelity > 0.0);
    CHECK(r.t_over_t2 == doctest::Approx(r.T / config.t2()));
  }
  std::ostringstream os;
  write_nmr_csv(os, out);
  CHECK(os.str().find("# control_probe_state") != std::string::npos);
  CHECK(os.str().find(std::string(kNmrCsvHeader)) != std::string::npos);

  CHECK_THROWS_AS(load_run_config("[scenario]\nname = amplitude-damping\n", RunMode::nmr),
                  ConfigError);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch_dir();
  const fs::path good = dir / "good.conf";
  spit(good, kSmallConfig);
  const fs::path out = dir / "out.csv";
  CHECK(run_cli("run --config " + good.string() + " --out " + out.string()) == 0);
  const std::string first = slurp(out);
  CHECK(first.find(std::string(kCsvHeader)) != std::string::npos);

  // Re-running from the results file reproduces it exactly.
  const fs::path again = dir / "again.csv";
  CHECK(run_cli("run --config " + out.string() + " --out " + again.string()) == 0);
  // The echoed output path differs, so compare everything after the config block.
  const auto data = [](const std::string& s) { return s.substr(s.find(kCsvHeader)); };
  CHECK(data(slurp(again)) == data(first));

  CHECK(run_cli("run --config " + good.string() + " --out " + out.string() + " --seed 99") == 0);
  CHECK(slurp(out).find("seed = 99") != std::string::npos);

  const fs::path bad = dir / "bad.conf";
  spit(bad, "[scenario]\nname = bit-flip\n");
  CHECK(run_cli("run --config " + bad.string()) == 2);
  CHECK(run_cli("run --config " + (dir / "missing.conf").string()) == 2);
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("t2 --linewidth-hz 0") == 2);
  CHECK(run_cli("t2 --linewidth-hz 2.13") == 0);

  // A derivative step far below round-off makes the central difference unusable.
  const fs::path fragile = dir / "fragile.conf";
  spit(fragile,
       "[scenario]\nname = transverse-dephasing\n[schemes]\nrun = standard\n"
       "[time_grid]\nvalues = 20\n[control]\nderivative_step = 1e-13\n");
  CHECK(run_cli("run --config " + fragile.string() + " --out " + (dir / "f.csv").string()) == 3);
}

TEST_CASE("shipped configurations load") {
  int loaded = 0;
  for (const auto& entry : fs::directory_iterator(QMETRO_CONFIG_DIR)) {
    if (entry.path().extension() != ".conf") continue;
    const RunMode mode =
        entry.path().stem() == "nmr" ? RunMode::nmr : RunMode::experiment;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_run_config_file(entry.path().string(), mode));
    ++loaded;
  }
  CHECK(loaded >= 7);
}
