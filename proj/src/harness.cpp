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

#include "qmetro/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace qmetro {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw ConfigError("[" + section + "] " + key + ": expected a number, got '" + v + "'");
  }
  return d;
}

long long parse_int(const std::string& section, const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("[" + section + "] " + key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& section, const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("[" + section + "] " + key + ": expected an unsigned integer, got '" + v +
                      "'");
  }
  return out;
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("[" + section + "] " + key + ": expected true or false, got '" + v + "'");
}

// Keys accepted per section.
const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"scenario", {"name", "omega0", "gamma", "gamma2", "gamma_plus"}},
      {"schemes", {"run"}},
      {"time_grid", {"start", "stop", "points", "spacing", "values"}},
      {"control",
       {"slices", "u_max", "probe", "warm_start", "derivative_step", "gamma_c"}},
      {"optimizer",
       {"max_evals", "x_tol", "f_tol", "restarts", "reflection", "expansion", "contraction",
        "shrink", "initial_step", "workers"}},
      {"run", {"seed", "output", "plot_data"}},
      {"nmr",
       {"linewidth_hz", "min_t_over_t2", "max_t_over_t2", "points", "fidelity_step",
        "standard_probe", "control_probe"}},
  };
  return keys;
}

// Strips the "# " prefix from an echoed configuration block.
std::string extract_echoed_config(std::string_view text) {
  std::stringstream in{std::string(text)};
  std::string line;
  std::getline(in, line);
  std::string out;
  while (std::getline(in, line)) {
    if (line == kConfigEnd) return out;
    if (line.rfind('#', 0) != 0) break;
    out += line.size() > 2 ? line.substr(2) : std::string();
    out += '\n';
  }
  throw ConfigError("results file has an unterminated configuration block");
}

const char* mode_label(RunMode m) { return m == RunMode::nmr ? "nmr" : "experiment"; }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  }
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile cfg;
  std::string section;
  std::stringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_keys().count(section)) {
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section +
                          "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": key outside of any section");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!known_keys().at(section).count(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "' in [" +
                        section + "]");
    }
    auto id = std::make_pair(section, key);
    if (cfg.values_.count(id)) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    cfg.values_[id] = value;
    cfg.order_.push_back(std::move(id));
  }
  return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return values_.count({section, key}) > 0;
}

const std::string& ConfigFile::get(const std::string& section, const std::string& key) const {
  return values_.at({section, key});
}

std::vector<double> TimeGridSpec::build() const {
  if (!values.empty()) return values;
  if (points < 1) throw ConfigError("time grid needs points >= 1");
  if (!(start > 0.0) || !(stop >= start)) {
    throw ConfigError("time grid needs 0 < start <= stop");
  }
  if (!log_spacing) return linspace(start, stop, points);
  std::vector<double> out = linspace(std::log(start), std::log(stop), points);
  for (double& t : out) t = std::exp(t);
  out.front() = start;
  out.back() = stop;
  return out;
}

TimeGridSpec default_time_grid(Scenario scenario, const ScenarioRates& rates) {
  const double gamma = rates.gamma;
  if (!(gamma > 0.0)) {
    throw ConfigError("no default time grid for a zero rate; set [time_grid] explicitly");
  }
  TimeGridSpec g;
  g.start = 0.1 / gamma;
  g.stop = (scenario == Scenario::transverse_dephasing ? 4.0 : 5.0) / gamma;
  g.points = 30;
  g.log_spacing = true;
  return g;
}

double t2_from_linewidth(double linewidth_hz) {
  if (!(linewidth_hz > 0.0) || !std::isfinite(linewidth_hz)) {
    throw std::invalid_argument("linewidth must be positive");
  }
  return 1.0 / (std::numbers::pi * linewidth_hz);
}

double RunConfig::t2() const { return t2_from_linewidth(nmr.linewidth_hz); }

SchemeConfig RunConfig::scheme_config(Scheme scheme) const {
  SchemeConfig c;
  c.scheme = scheme;
  c.scenario = scenario;
  c.rates = rates;
  c.omega0 = omega0;
  c.time_grid = time_grid();
  c.slices = slices;
  c.probe = probe;
  c.u_max = u_max;
  c.optimizer = optimizer;
  c.warm_start = warm_start;
  c.seed = seed;
  c.derivative_step = derivative_step;
  c.gamma_c = gamma_c;
  return c;
}

RunConfig load_run_config(std::string_view text, RunMode mode) {
  if (text.substr(0, kConfigBanner.size()) == kConfigBanner) {
    return load_run_config(extract_echoed_config(text), mode);
  }
  const ConfigFile f = ConfigFile::parse(text);
  auto has = [&](const char* s, const char* k) { return f.has(s, k); };
  auto str = [&](const char* s, const char* k) { return f.get(s, k); };
  auto num = [&](const char* s, const char* k, double fallback) {
    return has(s, k) ? parse_double(s, k, str(s, k)) : fallback;
  };
  auto integer = [&](const char* s, const char* k, long long fallback) {
    return has(s, k) ? parse_int(s, k, str(s, k)) : fallback;
  };
  auto probe_of = [&](const char* s, const char* k, Probe fallback) {
    if (!has(s, k)) return fallback;
    const auto p = parse_probe(str(s, k));
    if (!p) {
      throw ConfigError("unknown probe '" + str(s, k) + "'; valid probes: " + probe_names());
    }
    return *p;
  };

  RunConfig c;
  c.mode = mode;

  // NMR settings first: the scenario rate derives from the linewidth.
  c.nmr.linewidth_hz = num("nmr", "linewidth_hz", c.nmr.linewidth_hz);
  c.nmr.min_t_over_t2 = num("nmr", "min_t_over_t2", c.nmr.min_t_over_t2);
  c.nmr.max_t_over_t2 = num("nmr", "max_t_over_t2", c.nmr.max_t_over_t2);
  c.nmr.points = static_cast<int>(integer("nmr", "points", c.nmr.points));
  c.nmr.fidelity_step = num("nmr", "fidelity_step", c.nmr.fidelity_step);
  c.nmr.standard_probe = probe_of("nmr", "standard_probe", c.nmr.standard_probe);
  c.nmr.control_probe = probe_of("nmr", "control_probe", c.nmr.control_probe);
  if (mode == RunMode::nmr && (!(c.nmr.linewidth_hz > 0.0) || !(c.nmr.fidelity_step > 0.0))) {
    throw ConfigError("[nmr] linewidth_hz and fidelity_step must be positive");
  }

  if (mode == RunMode::experiment) {
    if (!has("scenario", "name")) {
      throw ConfigError("[scenario] name is required; valid scenarios: " + scenario_names());
    }
    const auto s = parse_scenario(str("scenario", "name"));
    if (!s) {
      throw ConfigError("unknown scenario '" + str("scenario", "name") +
                        "'; valid scenarios: " + scenario_names());
    }
    c.scenario = *s;
  } else {
    c.scenario = Scenario::parallel_dephasing_1q;
    if (has("scenario", "name") && str("scenario", "name") != "parallel-dephasing-1q") {
      throw ConfigError("nmr mode runs the parallel-dephasing-1q scenario only");
    }
  }

  c.rates = default_rates(c.scenario);
  if (mode == RunMode::nmr) c.rates.gamma = 1.0 / c.t2();
  c.rates.gamma = num("scenario", "gamma", c.rates.gamma);
  c.rates.gamma2 = num("scenario", "gamma2", c.rates.gamma2);
  c.rates.gamma_plus = num("scenario", "gamma_plus", c.rates.gamma_plus);
  c.omega0 = num("scenario", "omega0",
                 mode == RunMode::nmr ? 120.0 * std::numbers::pi : 2.0 * std::numbers::pi);

  if (has("schemes", "run")) {
    for (const auto& name : split_list(str("schemes", "run"))) {
      const auto s = parse_scheme(name);
      if (!s) {
        throw ConfigError("unknown scheme '" + name + "'; valid schemes: " + scheme_names());
      }
      c.schemes.push_back(*s);
    }
    if (c.schemes.empty()) throw ConfigError("[schemes] run lists no schemes");
  } else if (mode == RunMode::nmr) {
    c.schemes = {Scheme::standard, Scheme::control_enhanced};
  } else {
    c.schemes.push_back(Scheme::standard);
    if (scenario_qubits(c.scenario) == 1) c.schemes.push_back(Scheme::ancilla);
    if (c.scenario == Scenario::transverse_dephasing) {
      c.schemes.push_back(Scheme::theoretical_optimal);
    }
    c.schemes.push_back(Scheme::control_enhanced);
  }
  for (Scheme s : c.schemes) {
    if (s == Scheme::ancilla && scenario_qubits(c.scenario) != 1) {
      throw ConfigError("the ancilla scheme needs a single-qubit scenario");
    }
    if (s == Scheme::theoretical_optimal && c.scenario != Scenario::transverse_dephasing) {
      throw ConfigError("theoretical_optimal applies to transverse-dephasing only");
    }
    if (mode == RunMode::nmr && s != Scheme::standard && s != Scheme::control_enhanced) {
      throw ConfigError("nmr mode compares the standard and control_enhanced schemes only");
    }
  }

  if (has("time_grid", "values")) {
    for (const auto& v : split_list(str("time_grid", "values"))) {
      c.grid.values.push_back(parse_double("time_grid", "values", v));
    }
  } else {
    if (mode == RunMode::nmr) {
      c.grid.start = c.nmr.min_t_over_t2 * c.t2();
      c.grid.stop = c.nmr.max_t_over_t2 * c.t2();
      c.grid.points = c.nmr.points;
      c.grid.log_spacing = false;
    } else if (!has("time_grid", "start") || !has("time_grid", "stop")) {
      c.grid = default_time_grid(c.scenario, c.rates);
    }
    c.grid.start = num("time_grid", "start", c.grid.start);
    c.grid.stop = num("time_grid", "stop", c.grid.stop);
    c.grid.points = static_cast<int>(integer("time_grid", "points", c.grid.points > 0 ? c.grid.points : 30));
    if (has("time_grid", "spacing")) {
      const std::string sp = str("time_grid", "spacing");
      if (sp != "log" && sp != "linear") {
        throw ConfigError("[time_grid] spacing must be 'log' or 'linear'");
      }
      c.grid.log_spacing = sp == "log";
    }
  }

  c.slices = static_cast<int>(integer("control", "slices", mode == RunMode::nmr ? 5 : 20));
  c.u_max = num("control", "u_max", 20.0 * std::abs(c.omega0));
  c.probe = probe_of("control", "probe",
                     mode == RunMode::nmr ? c.nmr.control_probe : Probe::standard);
  c.warm_start = has("control", "warm_start")
                     ? parse_bool("control", "warm_start", str("control", "warm_start"))
                     : false;
  c.derivative_step = num("control", "derivative_step", default_derivative_step(c.omega0));
  c.gamma_c = num("control", "gamma_c", 1.0);

  const OptimizerOptions base = default_control_optimizer(c.u_max);
  std::size_t fields = 0;
  {
    // Field count of the control preset, for the resolved evaluation budget.
    fields = make_model(c.scenario, c.omega0, c.rates).num_controls();
  }
  c.optimizer = base;
  c.optimizer.max_evals =
      integer("optimizer", "max_evals", 200LL * c.slices * static_cast<long long>(fields));
  c.optimizer.x_tol = num("optimizer", "x_tol", base.x_tol);
  c.optimizer.f_tol = num("optimizer", "f_tol", base.f_tol);
  c.optimizer.restarts = static_cast<int>(integer("optimizer", "restarts", 4));
  c.optimizer.reflection = num("optimizer", "reflection", base.reflection);
  c.optimizer.expansion = num("optimizer", "expansion", base.expansion);
  c.optimizer.contraction = num("optimizer", "contraction", base.contraction);
  c.optimizer.shrink = num("optimizer", "shrink", base.shrink);
  c.optimizer.initial_step = num("optimizer", "initial_step", base.initial_step);
  c.optimizer.workers = static_cast<int>(integer("optimizer", "workers", 1));

  c.seed = has("run", "seed") ? parse_u64("run", "seed", str("run", "seed")) : 0;
  c.output = has("run", "output") ? str("run", "output")
                                  : std::string(mode == RunMode::nmr ? "nmr.csv" : "results.csv");
  c.plot_data = has("run", "plot_data") ? parse_bool("run", "plot_data", str("run", "plot_data"))
                                        : false;

  try {
    for (Scheme s : c.schemes) c.scheme_config(s).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_run_config_file(const std::string& path, RunMode mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_run_config(ss.str(), mode);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_config(const RunConfig& c) {
  std::ostringstream o;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
  auto d = [&](const char* k, double v) { kv(k, format_double(v)); };

  o << "# mode: " << mode_label(c.mode) << '\n';
  o << "[scenario]\n";
  kv("name", std::string(scenario_name(c.scenario)));
  d("omega0", c.omega0);
  d("gamma", c.rates.gamma);
  d("gamma2", c.rates.gamma2);
  d("gamma_plus", c.rates.gamma_plus);

  o << "[schemes]\n";
  std::string list;
  for (Scheme s : c.schemes) {
    if (!list.empty()) list += ", ";
    list += scheme_name(s);
  }
  kv("run", list);

  o << "[time_grid]\n";
  std::string values;
  for (double t : c.time_grid()) {
    if (!values.empty()) values += ", ";
    values += format_double(t);
  }
  kv("values", values);

  o << "[control]\n";
  kv("slices", std::to_string(c.slices));
  d("u_max", c.u_max);
  kv("probe", std::string(probe_name(c.probe)));
  kv("warm_start", c.warm_start ? "true" : "false");
  d("derivative_step", c.derivative_step);
  d("gamma_c", c.gamma_c);

  o << "[optimizer]\n";
  kv("max_evals", std::to_string(c.optimizer.max_evals));
  d("x_tol", c.optimizer.x_tol);
  d("f_tol", c.optimizer.f_tol);
  kv("restarts", std::to_string(c.optimizer.restarts));
  d("reflection", c.optimizer.reflection);
  d("expansion", c.optimizer.expansion);
  d("contraction", c.optimizer.contraction);
  d("shrink", c.optimizer.shrink);
  d("initial_step", c.optimizer.initial_step);
  kv("workers", std::to_string(c.optimizer.workers));

  o << "[run]\n";
  kv("seed", std::to_string(c.seed));
  kv("output", c.output);
  kv("plot_data", c.plot_data ? "true" : "false");

  if (c.mode == RunMode::nmr) {
    o << "[nmr]\n";
    d("linewidth_hz", c.nmr.linewidth_hz);
    d("min_t_over_t2", c.nmr.min_t_over_t2);
    d("max_t_over_t2", c.nmr.max_t_over_t2);
    kv("points", std::to_string(c.nmr.points));
    d("fidelity_step", c.nmr.fidelity_step);
    kv("standard_probe", std::string(probe_name(c.nmr.standard_probe)));
    kv("control_probe", std::string(probe_name(c.nmr.control_probe)));
  }
  return o.str();
}

ExperimentOutput run_experiment(const RunConfig& config) {
  ExperimentOutput out{config, {}};
  for (Scheme s : config.schemes) {
    auto rows = run_scheme(config.scheme_config(s));
    for (auto& r : rows) out.rows.push_back(std::move(r));
  }
  return out;
}

NmrOutput run_nmr_protocol(const RunConfig& config) {
  if (config.mode != RunMode::nmr) throw std::invalid_argument("config is not in nmr mode");
  const double t2 = config.t2();
  const double fid_step = config.nmr.fidelity_step;

  const DensityMatrix<double> control_probe =
      make_probe(config.nmr.control_probe, scenario_qubits(config.scenario), config.seed);

  NmrOutput out{config, control_probe, {}};
  for (Scheme s : config.schemes) {
    SchemeConfig sc = config.scheme_config(s);
    sc.probe = s == Scheme::control_enhanced ? config.nmr.control_probe
                                             : config.nmr.standard_probe;
    // The standard arm uses the configured NMR probe rather than the scheme
    // default, so it is evaluated here as a zero-amplitude schedule.
    std::vector<MetrologyResult> results;
    const EncodingModel<double> model = make_model(sc.scenario, sc.omega0, sc.rates);
    const DensityMatrix<double> probe = make_probe(sc.probe, model.n_qubits, sc.seed);
    if (s == Scheme::control_enhanced) {
      results = run_control_enhanced(sc);
    } else {
      const Evolver<double> evolver(model);
      for (double t : sc.time_grid) {
        auto schedule = ControlSchedule<double>::zeros(
            sc.slices, static_cast<Eigen::Index>(model.num_controls()), t);
        const double qfi =
            schedule_qfi(evolver, schedule, probe, sc.resolved_derivative_step()).value;
        results.push_back({s, t, qfi, sensitivity(qfi, t, sc.gamma_c), std::move(schedule), 0,
                           sc.seed, true});
      }
    }

    EncodingModel<double> shifted = model;
    shifted.omega0 = model.omega0 + fid_step;
    const Evolver<double> exact_ev(model);
    const Evolver<double> shifted_ev(shifted);
    for (auto& r : results) {
      const auto exact = exact_ev.evolve(r.schedule, probe);
      const auto perturbed = shifted_ev.evolve(r.schedule, probe);
      const double fq = qfi_fidelity(exact, perturbed, fid_step).value;
      out.rows.push_back({s, r.T, r.T / t2, r.qfi, fq, r.evals, r.seed, r.converged,
                          std::move(r.schedule)});
    }
  }
  return out;
}

namespace {

void write_config_block(std::ostream& os, const RunConfig& config) {
  os << kConfigBanner << '\n';
  std::istringstream in(render_config(config));
  std::string line;
  while (std::getline(in, line)) os << "# " << line << '\n';
  os << kConfigEnd << '\n';
}

}  // namespace

void write_experiment_csv(std::ostream& os, const ExperimentOutput& out) {
  write_config_block(os, out.config);
  os << kCsvHeader << '\n';
  for (const auto& r : out.rows) {
    os << scheme_name(r.scheme) << ',' << format_double(r.T) << ',' << format_double(r.qfi)
       << ',' << format_double(r.sensitivity) << ',' << r.evals << ',' << r.seed << ','
       << (r.converged ? "true" : "false") << '\n';
  }
}

void write_nmr_csv(std::ostream& os, const NmrOutput& out) {
  write_config_block(os, out.config);
  const auto& m = out.control_probe.matrix();
  os << "# control_probe_state (row-major re,im):";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << ' ' << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
  os << '\n';
  os << "# T2_s = " << format_double(out.config.t2()) << '\n';
  os << kNmrCsvHeader << '\n';
  for (const auto& r : out.rows) {
    os << scheme_name(r.scheme) << ',' << format_double(r.T) << ',' << format_double(r.t_over_t2)
       << ',' << format_double(r.qfi_theo) << ',' << format_double(r.qfi_fidelity) << ','
       << r.evals << ',' << r.seed << ',' << (r.converged ? "true" : "false") << '\n';
  }
}

std::vector<std::string> write_plot_data(const ExperimentOutput& out, const std::string& output) {
  namespace fs = std::filesystem;
  const fs::path base(output);
  const fs::path stem = base.parent_path() / base.stem();
  std::vector<std::string> written;
  for (Scheme s : out.config.schemes) {
    for (const char* quantity : {"qfi", "sensitivity"}) {
      const std::string path =
          stem.string() + "." + std::string(scheme_name(s)) + "." + quantity + ".dat";
      std::ofstream f(path);
      if (!f) throw std::runtime_error("cannot write plot data '" + path + "'");
      f << "# T_s " << quantity << '\n';
      for (const auto& r : out.rows) {
        if (r.scheme != s) continue;
        const double v = std::string(quantity) == "qfi" ? r.qfi : r.sensitivity;
        f << format_double(r.T) << ' ' << format_double(v) << '\n';
      }
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace qmetro
