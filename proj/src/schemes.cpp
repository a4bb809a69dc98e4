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

#include "qmetro/schemes.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <utility>

namespace qmetro {

namespace {

constexpr std::array<std::pair<Scheme, std::string_view>, 4> kSchemes = {{
    {Scheme::standard, "standard"},
    {Scheme::ancilla, "ancilla"},
    {Scheme::theoretical_optimal, "theoretical_optimal"},
    {Scheme::control_enhanced, "control_enhanced"},
}};

constexpr std::array<std::pair<Probe, std::string_view>, 5> kProbes = {{
    {Probe::standard, "standard"},
    {Probe::plus, "plus"},
    {Probe::ghz, "ghz"},
    {Probe::bell_with_ancilla, "bell_with_ancilla"},
    {Probe::random_seeded, "random_seeded"},
}};

template <typename Table, typename Value>
std::string_view lookup_name(const Table& table, Value v) {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "unknown";
}

template <typename Value, typename Table>
std::optional<Value> lookup_value(const Table& table, std::string_view n) {
  for (const auto& [value, name] : table) {
    if (name == n) return value;
  }
  return std::nullopt;
}

template <typename Table>
std::string join_names(const Table& table) {
  std::string out;
  for (const auto& [value, name] : table) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

CVector<double> ghz_vector(int n_qubits) {
  const Eigen::Index d = Eigen::Index(1) << n_qubits;
  CVector<double> psi = CVector<double>::Zero(d);
  psi(0) = psi(d - 1) = 1.0 / std::sqrt(2.0);
  return psi;
}

MetrologyResult make_result(const SchemeConfig& config, double t, double qfi,
                            ControlSchedule<double> schedule, long evals, bool converged) {
  return {config.scheme, t,     qfi,         sensitivity(qfi, t, config.gamma_c),
          std::move(schedule), evals, config.seed, converged};
}

std::string at_time(const SchemeConfig& config, double t, const std::exception& e) {
  char when[64];
  std::snprintf(when, sizeof when, " at T = %.17g s: ", t);
  return std::string(scheme_name(config.scheme)) + when + e.what();
}

// QFI of fixed schedules over the time grid.
template <typename ScheduleFor>
std::vector<MetrologyResult> run_fixed(const SchemeConfig& config, const SchemeSetup& setup,
                                       ScheduleFor schedule_for) {
  const Evolver<double> evolver(setup.model);
  const double delta = config.resolved_derivative_step();
  std::vector<MetrologyResult> out;
  out.reserve(config.time_grid.size());
  for (double t : config.time_grid) {
    ControlSchedule<double> schedule = schedule_for(t);
    double qfi = 0.0;
    try {
      qfi = schedule_qfi(evolver, schedule, setup.probe, delta).value;
    } catch (const NumericalError& e) {
      throw NumericalError(at_time(config, t, e));
    }
    out.push_back(make_result(config, t, qfi, std::move(schedule), 0, true));
  }
  return out;
}

}  // namespace

std::string_view scheme_name(Scheme s) { return lookup_name(kSchemes, s); }
std::optional<Scheme> parse_scheme(std::string_view name) {
  return lookup_value<Scheme>(kSchemes, name);
}
std::string scheme_names() { return join_names(kSchemes); }

std::string_view probe_name(Probe p) { return lookup_name(kProbes, p); }
std::optional<Probe> parse_probe(std::string_view name) {
  return lookup_value<Probe>(kProbes, name);
}
std::string probe_names() { return join_names(kProbes); }

DensityMatrix<double> make_probe(Probe probe, int n_qubits, std::uint64_t seed) {
  if (n_qubits < 1 || n_qubits > 2) throw std::invalid_argument("probes support 1 or 2 qubits");
  const Eigen::Index d = Eigen::Index(1) << n_qubits;
  switch (probe) {
    case Probe::standard:
      return DensityMatrix<double>::pure(ghz_vector(n_qubits));
    case Probe::plus: {
      CVector<double> psi = CVector<double>::Constant(d, 1.0);
      return DensityMatrix<double>::pure(psi);
    }
    case Probe::ghz:
      return DensityMatrix<double>::pure(ghz_vector(n_qubits));
    case Probe::bell_with_ancilla:
      if (n_qubits != 2) throw std::invalid_argument("bell_with_ancilla probe needs two qubits");
      return DensityMatrix<double>::pure(ghz_vector(2));
    case Probe::random_seeded: {
      // Haar-random pure state from complex Gaussian amplitudes.
      std::mt19937_64 rng(derive_seed(seed, 0x70726f6265ULL));
      std::normal_distribution<double> normal(0.0, 1.0);
      CVector<double> psi(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        psi(i) = {re, im};
      }
      return DensityMatrix<double>::pure(psi);
    }
  }
  throw std::invalid_argument("unknown probe");
}

double SchemeConfig::resolved_u_max() const {
  return u_max > 0.0 ? u_max : 20.0 * std::abs(omega0);
}

double SchemeConfig::resolved_derivative_step() const {
  return derivative_step > 0.0 ? derivative_step : default_derivative_step(omega0);
}

void SchemeConfig::validate() const {
  if (time_grid.empty()) throw std::invalid_argument("time grid is empty");
  for (std::size_t i = 0; i < time_grid.size(); ++i) {
    if (!(time_grid[i] > 0.0) || !std::isfinite(time_grid[i])) {
      throw std::invalid_argument("time grid values must be finite and positive");
    }
    if (i > 0 && !(time_grid[i] > time_grid[i - 1])) {
      throw std::invalid_argument("time grid must be strictly increasing");
    }
  }
  if (slices < 1) throw std::invalid_argument("slice count K must be >= 1");
  if (!std::isfinite(omega0)) throw std::invalid_argument("omega0 must be finite");
  if (!(resolved_u_max() > 0.0)) throw std::invalid_argument("u_max must be positive");
  if (!(gamma_c > 0.0)) throw std::invalid_argument("gamma_c must be positive");
  optimizer.validate();
}

OptimizerOptions default_control_optimizer(double u_max) {
  OptimizerOptions o;
  o.initial_step = 0.05 * u_max;
  o.x_tol = 1e-6 * u_max;
  o.f_tol = 1e-8;
  o.max_evals = 0;
  return o;
}

SchemeSetup scheme_setup(const SchemeConfig& config) {
  EncodingModel<double> model = make_model(config.scenario, config.omega0, config.rates);
  if (config.scheme == Scheme::ancilla) {
    if (model.n_qubits != 1) {
      throw std::invalid_argument("ancilla scheme supports single-qubit scenarios only");
    }
    model = ancilla_extend(model);
    return {std::move(model), make_probe(Probe::bell_with_ancilla, 2, config.seed)};
  }
  const Probe probe = config.scheme == Scheme::control_enhanced ? config.probe : Probe::standard;
  return {model, make_probe(probe, model.n_qubits, config.seed)};
}

std::vector<MetrologyResult> run_standard(const SchemeConfig& config) {
  config.validate();
  SchemeConfig c = config;
  c.scheme = Scheme::standard;
  const SchemeSetup setup = scheme_setup(c);
  const auto fields = static_cast<Eigen::Index>(setup.model.num_controls());
  return run_fixed(c, setup, [&](double t) {
    return ControlSchedule<double>::zeros(c.slices, fields, t);
  });
}

std::vector<MetrologyResult> run_ancilla_assisted(const SchemeConfig& config) {
  config.validate();
  SchemeConfig c = config;
  c.scheme = Scheme::ancilla;
  const SchemeSetup setup = scheme_setup(c);
  const auto fields = static_cast<Eigen::Index>(setup.model.num_controls());
  return run_fixed(c, setup, [&](double t) {
    return ControlSchedule<double>::zeros(c.slices, fields, t);
  });
}

std::vector<MetrologyResult> run_theoretical_optimal(const SchemeConfig& config) {
  config.validate();
  if (config.scenario != Scenario::transverse_dephasing) {
    throw std::invalid_argument(
        "theoretical_optimal applies to the transverse-dephasing scenario only");
  }
  SchemeConfig c = config;
  c.scheme = Scheme::theoretical_optimal;
  const SchemeSetup setup = scheme_setup(c);
  RVector<double> u(1);
  u(0) = -c.omega0;  // cancels the drift at the true frequency
  return run_fixed(c, setup, [&](double t) {
    return ControlSchedule<double>::constant(c.slices, u, t);
  });
}

std::vector<MetrologyResult> run_control_enhanced(const SchemeConfig& config) {
  config.validate();
  SchemeConfig c = config;
  c.scheme = Scheme::control_enhanced;
  const SchemeSetup setup = scheme_setup(c);
  const Evolver<double> evolver(setup.model);
  const double delta = c.resolved_derivative_step();
  const double u_max = c.resolved_u_max();
  const auto fields = static_cast<Eigen::Index>(setup.model.num_controls());
  const Eigen::Index n = c.slices * fields;
  const Bounds box = Bounds::symmetric(n, u_max);

  std::vector<MetrologyResult> out;
  out.reserve(c.time_grid.size());
  std::optional<Eigen::VectorXd> previous;
  for (std::size_t ti = 0; ti < c.time_grid.size(); ++ti) {
    const double t = c.time_grid[ti];
    const Objective objective = [&](const Eigen::VectorXd& u) {
      const auto schedule = ControlSchedule<double>::from_flat(u, c.slices, fields, t);
      return -schedule_qfi(evolver, schedule, setup.probe, delta).value;
    };
    OptimizerOptions opts = c.optimizer;
    opts.seed = derive_seed(c.seed, ti);
    std::vector<Eigen::VectorXd> starts{Eigen::VectorXd::Zero(n)};
    if (c.warm_start && previous) starts.push_back(*previous);

    MultiStartResult best;
    try {
      best = multi_start(objective, box, opts, starts);
    } catch (const NumericalError& e) {
      throw NumericalError(at_time(c, t, e));
    }
    previous = best.best.x;
    out.push_back(make_result(c, t, -best.best.f,
                              ControlSchedule<double>::from_flat(best.best.x, c.slices, fields, t),
                              best.total_evals, best.best.converged));
  }
  return out;
}

std::vector<MetrologyResult> run_scheme(const SchemeConfig& config) {
  switch (config.scheme) {
    case Scheme::standard:
      return run_standard(config);
    case Scheme::ancilla:
      return run_ancilla_assisted(config);
    case Scheme::theoretical_optimal:
      return run_theoretical_optimal(config);
    case Scheme::control_enhanced:
      return run_control_enhanced(config);
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace qmetro
