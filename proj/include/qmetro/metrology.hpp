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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "qmetro/liouville.hpp"
#include "qmetro/propagation.hpp"

namespace qmetro {

enum class QfiMethod { eigendecomposition, fidelity };

struct QfiEstimate {
  double value = 0.0;  // s^2
  QfiMethod method = QfiMethod::eigendecomposition;
  double delta_omega = 0.0;
  double spectral_cutoff = 0.0;
};

inline constexpr double kDefaultSpectralCutoff = 1e-12;
/// Eigenvalues of a state below this are treated as exact zeros when taking
/// square roots.
inline constexpr double kSqrtClampThreshold = 1e-13;

/// Central-difference step for d rho / d omega.
inline double default_derivative_step(double omega0) {
  return 1e-4 * std::max(std::abs(omega0), 1.0);
}

/// Frequency offset for the fidelity estimator.
inline double default_fidelity_step(double omega0) {
  return 1e-3 * std::max(std::abs(omega0), 1.0);
}

/// (rho(omega0 + delta) - rho(omega0 - delta)) / (2 delta).
template <typename Real>
CMatrix<Real> drho_domega(const Evolver<Real>& evolver, const ControlSchedule<Real>& schedule,
                          const DensityMatrix<Real>& rho0, Real delta) {
  if (!(delta > Real(0))) throw std::invalid_argument("drho_domega: delta must be positive");
  const Real w = evolver.omega0();
  const CMatrix<Real> plus = evolver.evolve(schedule, rho0, w + delta).matrix();
  const CMatrix<Real> minus = evolver.evolve(schedule, rho0, w - delta).matrix();
  CMatrix<Real> d = (plus - minus) / (Real(2) * delta);
  const double trace_drift = static_cast<double>(std::abs(d.trace()));
  const double herm_drift = static_cast<double>(hermiticity_error(d));
  if (!d.allFinite() || trace_drift > 1e-9 || herm_drift > 1e-9) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "drho_domega: finite difference lost precision (trace %.3g, hermiticity "
                  "%.3g); increase delta",
                  trace_drift, herm_drift);
    throw NumericalError(msg);
  }
  return d;
}

template <typename Real>
CMatrix<Real> drho_domega(const EncodingModel<Real>& model, const ControlSchedule<Real>& schedule,
                          const DensityMatrix<Real>& rho0, Real delta) {
  return drho_domega(Evolver<Real>(model), schedule, rho0, delta);
}

/// F_Q = sum over eigenpairs with lambda_p + lambda_q > cutoff of
/// 2 |<p| d rho |q>|^2 / (lambda_p + lambda_q).
template <typename Real>
QfiEstimate qfi_eigen(const DensityMatrix<Real>& rho, const CMatrix<Real>& drho,
                      double cutoff = kDefaultSpectralCutoff) {
  if (drho.rows() != rho.dim() || drho.cols() != rho.dim()) {
    throw std::invalid_argument("qfi_eigen: derivative dimension mismatch");
  }
  const CMatrix<Real> h = (rho.matrix() + rho.matrix().adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h);
  const auto& lambda = es.eigenvalues();
  const CMatrix<Real> m = es.eigenvectors().adjoint() * drho * es.eigenvectors();
  Real f(0);
  for (Eigen::Index p = 0; p < lambda.size(); ++p) {
    for (Eigen::Index q = 0; q < lambda.size(); ++q) {
      const Real s = lambda(p) + lambda(q);
      if (s > Real(cutoff)) f += Real(2) * std::norm(m(p, q)) / s;
    }
  }
  return {static_cast<double>(f), QfiMethod::eigendecomposition, 0.0, cutoff};
}

template <typename Real>
struct PsdSqrt {
  CMatrix<Real> root;
  double clamped = 0.0;  // total magnitude of eigenvalues set to zero
};

/// Square root of a Hermitian PSD matrix; eigenvalues below the threshold
/// (including small negative ones) are clamped to zero.
template <typename Real>
PsdSqrt<Real> psd_sqrt(const CMatrix<Real>& m, double threshold = kSqrtClampThreshold) {
  const CMatrix<Real> h = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h);
  RVector<Real> roots(es.eigenvalues().size());
  double clamped = 0.0;
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    const Real l = es.eigenvalues()(i);
    if (l > Real(threshold)) {
      roots(i) = std::sqrt(l);
    } else {
      roots(i) = Real(0);
      clamped += std::abs(static_cast<double>(l));
    }
  }
  return {es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint(), clamped};
}

template <typename Real>
struct FidelityResult {
  double value = 0.0;
  double clamped = 0.0;
};

/// Tr sqrt(sqrt(rho) sigma sqrt(rho)) with clamping diagnostics.
template <typename Real>
FidelityResult<Real> uhlmann_fidelity_detailed(const DensityMatrix<Real>& rho,
                                               const DensityMatrix<Real>& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const PsdSqrt<Real> sr = psd_sqrt<Real>(rho.matrix());
  const CMatrix<Real> inner = sr.root * sigma.matrix() * sr.root;
  const CMatrix<Real> h = (inner + inner.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h, Eigen::EigenvaluesOnly);
  Real f(0);
  double clamped = sr.clamped;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Real l = es.eigenvalues()(i);
    if (l > Real(0)) {
      f += std::sqrt(l);
    } else {
      clamped += std::abs(static_cast<double>(l));
    }
  }
  return {std::clamp(static_cast<double>(f), 0.0, 1.0), clamped};
}

template <typename Real>
double uhlmann_fidelity(const DensityMatrix<Real>& rho, const DensityMatrix<Real>& sigma) {
  return uhlmann_fidelity_detailed(rho, sigma).value;
}

/// F_Q ~ 8 (1 - F(rho, rho')) / delta^2.
template <typename Real>
QfiEstimate qfi_fidelity(const DensityMatrix<Real>& exact, const DensityMatrix<Real>& perturbed,
                         double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("qfi_fidelity: delta must be positive");
  const double f = uhlmann_fidelity(exact, perturbed);
  double value = 8.0 * (1.0 - f) / (delta * delta);
  if (value < -1e-6) {
    throw NumericalError("qfi_fidelity: negative estimate " + std::to_string(value));
  }
  value = std::max(value, 0.0);
  return {value, QfiMethod::fidelity, delta, 0.0};
}

/// upsilon = sqrt(T) / (gamma_c sqrt(F_Q)); infinite when F_Q = 0.
inline double sensitivity(double qfi, double total_time, double gamma_c = 1.0) {
  if (!(total_time > 0.0) || !(gamma_c > 0.0) || !(qfi >= 0.0)) {
    throw std::invalid_argument("sensitivity: need F_Q >= 0, T > 0, gamma_c > 0");
  }
  if (qfi == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(total_time) / (gamma_c * std::sqrt(qfi));
}

/// State and eigen-QFI at omega0 for a schedule, using central differences.
template <typename Real>
QfiEstimate schedule_qfi(const Evolver<Real>& evolver, const ControlSchedule<Real>& schedule,
                         const DensityMatrix<Real>& rho0, Real delta,
                         double cutoff = kDefaultSpectralCutoff) {
  const DensityMatrix<Real> rho = evolver.evolve(schedule, rho0);
  QfiEstimate q = qfi_eigen(rho, drho_domega(evolver, schedule, rho0, delta), cutoff);
  q.delta_omega = static_cast<double>(delta);
  return q;
}

}  // namespace qmetro
