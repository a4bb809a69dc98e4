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

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qmetro/liouville.hpp"
#include "qmetro/types.hpp"

namespace qmetro {

namespace detail {
template <typename Real>
void require_rate(Real gamma, const char* what) {
  if (!(gamma >= Real(0)) || !std::isfinite(static_cast<double>(gamma))) {
    throw std::invalid_argument(std::string(what) + ": rates must be finite and non-negative");
  }
}
}  // namespace detail

/// L = sigma_z / sqrt(2) at rate gamma: d rho/dt = gamma/2 (Z rho Z - rho).
template <typename Real = double>
NoiseChannel<Real> parallel_dephasing(Real gamma) {
  detail::require_rate(gamma, "parallel_dephasing");
  NoiseChannel<Real> ch;
  ch.add(pauli::z<Real>() / std::sqrt(Real(2)), gamma);
  return ch;
}

template <typename Real = double>
NoiseChannel<Real> two_qubit_uncorrelated_dephasing(Real gamma1, Real gamma2) {
  detail::require_rate(gamma1, "two_qubit_uncorrelated_dephasing");
  detail::require_rate(gamma2, "two_qubit_uncorrelated_dephasing");
  const CMatrix<Real> id = pauli::identity<Real>();
  const CMatrix<Real> zs = pauli::z<Real>() / std::sqrt(Real(2));
  NoiseChannel<Real> ch;
  ch.add(kron(zs, id), gamma1);
  ch.add(kron(id, zs), gamma2);
  return ch;
}

/// L = sigma_x / sqrt(2) at rate gamma.
template <typename Real = double>
NoiseChannel<Real> transverse_dephasing(Real gamma) {
  detail::require_rate(gamma, "transverse_dephasing");
  NoiseChannel<Real> ch;
  ch.add(pauli::x<Real>() / std::sqrt(Real(2)), gamma);
  return ch;
}

/// Generalized amplitude damping: sigma_- at gamma_minus, sigma_+ at gamma_plus.
template <typename Real = double>
NoiseChannel<Real> amplitude_damping(Real gamma_minus, Real gamma_plus = Real(0)) {
  detail::require_rate(gamma_minus, "amplitude_damping");
  detail::require_rate(gamma_plus, "amplitude_damping");
  NoiseChannel<Real> ch;
  ch.add(pauli::lowering<Real>(), gamma_minus);
  ch.add(pauli::raising<Real>(), gamma_plus);
  return ch;
}

/// sum_n sigma_z^(n) / 2, so that H_0(omega) = omega * generator.
template <typename Real = double>
CMatrix<Real> frequency_generator(int n_qubits) {
  const CMatrix<Real> half_z = pauli::z<Real>() / Real(2);
  const CMatrix<Real> id = pauli::identity<Real>();
  switch (n_qubits) {
    case 1:
      return half_z;
    case 2:
      return kron(half_z, id) + kron(id, half_z);
    default:
      throw std::invalid_argument("frequency_encoding supports 1 or 2 qubits");
  }
}

template <typename Real = double>
CMatrix<Real> frequency_encoding(Real omega0, int n_qubits) {
  return omega0 * frequency_generator<Real>(n_qubits);
}

/// Drift omega * G plus controls u_l H_l, under a Markovian channel.
template <typename Real = double>
struct EncodingModel {
  int n_qubits = 1;
  Real omega0 = Real(0);
  CMatrix<Real> drift_generator;
  std::vector<CMatrix<Real>> control_hams;
  NoiseChannel<Real> channel;
  bool ancilla_extended = false;

  Eigen::Index dim() const { return drift_generator.rows(); }
  std::size_t num_controls() const { return control_hams.size(); }

  void validate() const {
    const Eigen::Index d = Eigen::Index(1) << n_qubits;
    if (drift_generator.rows() != d || drift_generator.cols() != d) {
      throw std::invalid_argument("encoding model: drift dimension does not match qubit count");
    }
    if (hermiticity_error(drift_generator) > 1e-12) {
      throw std::invalid_argument("encoding model: drift generator is not Hermitian");
    }
    for (const auto& h : control_hams) {
      if (h.rows() != d || h.cols() != d) {
        throw std::invalid_argument("encoding model: control Hamiltonian dimension mismatch");
      }
      if (hermiticity_error(h) > 1e-12) {
        throw std::invalid_argument("encoding model: control Hamiltonian is not Hermitian");
      }
    }
    if (!channel.empty() && channel.dim() != d) {
      throw std::invalid_argument("encoding model: channel dimension mismatch");
    }
  }
};

/// Transverse controls {sigma_x/2, sigma_y/2} on each qubit.
template <typename Real = double>
std::vector<CMatrix<Real>> transverse_controls(int n_qubits) {
  const CMatrix<Real> hx = pauli::x<Real>() / Real(2);
  const CMatrix<Real> hy = pauli::y<Real>() / Real(2);
  if (n_qubits == 1) return {hx, hy};
  if (n_qubits == 2) {
    const CMatrix<Real> id = pauli::identity<Real>();
    return {kron(hx, id), kron(hy, id), kron(id, hx), kron(id, hy)};
  }
  throw std::invalid_argument("transverse_controls supports 1 or 2 qubits");
}

template <typename Real = double>
std::vector<CMatrix<Real>> longitudinal_controls() {
  return {CMatrix<Real>(pauli::z<Real>() / Real(2))};
}

/// Adds a noiseless, drift-free ancilla as the second tensor factor.
template <typename Real = double>
EncodingModel<Real> ancilla_extend(const EncodingModel<Real>& model) {
  if (model.ancilla_extended) {
    throw std::invalid_argument("ancilla_extend: model already carries an ancilla");
  }
  if (model.n_qubits != 1) {
    throw std::invalid_argument("ancilla_extend: only single-qubit models can be extended");
  }
  const CMatrix<Real> id = pauli::identity<Real>();
  EncodingModel<Real> out;
  out.n_qubits = 2;
  out.omega0 = model.omega0;
  out.drift_generator = kron(model.drift_generator, id);
  for (const auto& h : model.control_hams) out.control_hams.push_back(kron(h, id));
  for (std::size_t v = 0; v < model.channel.size(); ++v) {
    out.channel.add(kron(model.channel.operators()[v], id), model.channel.rates()[v]);
  }
  out.ancilla_extended = true;
  return out;
}

/// Partial trace over the second qubit of a two-qubit operator.
template <typename Real = double>
CMatrix<Real> trace_out_second(const CMatrix<Real>& m) {
  if (m.rows() != 4 || m.cols() != 4) {
    throw std::invalid_argument("trace_out_second expects a 4x4 matrix");
  }
  CMatrix<Real> out(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = m(2 * i, 2 * j) + m(2 * i + 1, 2 * j + 1);
  return out;
}

/// Named noise scenarios exposed on the command line.
enum class Scenario {
  parallel_dephasing_1q,
  parallel_dephasing_2q,
  transverse_dephasing,
  amplitude_damping,
};

struct ScenarioRates {
  double gamma = 0.0;       // primary rate; gamma_minus for amplitude damping
  double gamma2 = 0.0;      // second qubit (parallel-dephasing-2q)
  double gamma_plus = 0.0;  // amplitude damping excitation rate
};

std::string_view scenario_name(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);
/// Comma-separated list of valid names, for error messages.
std::string scenario_names();
ScenarioRates default_rates(Scenario s);
int scenario_qubits(Scenario s);

/// Drift, control preset and channel for a scenario.
EncodingModel<double> make_model(Scenario s, double omega0, const ScenarioRates& rates);

}  // namespace qmetro
