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

// Liouville-space representation of states and Lindblad generators.
//
// Vectorization is column stacking: rho_{ij} sits at index j*d + i, so that
// U rho V maps to (V^T (x) U) |rho>>.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmetro/types.hpp"

namespace qmetro {

struct StateDiagnostics {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};

template <typename Real>
StateDiagnostics diagnose_state(const CMatrix<Real>& m) {
  StateDiagnostics out;
  out.trace_error = static_cast<double>(std::abs(m.trace() - Complex<Real>(1)));
  out.hermiticity_error = static_cast<double>(hermiticity_error(m));
  const CMatrix<Real> h = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = static_cast<double>(es.eigenvalues().minCoeff());
  return out;
}

/// Hermitian, unit-trace, positive semidefinite d x d matrix.
template <typename Real>
class DensityMatrix {
 public:
  struct Tolerance {
    double trace = 1e-12;
    double hermiticity = 1e-12;
    double negativity = 1e-10;
  };

  /// Validates the invariants; throws std::invalid_argument on violation.
  explicit DensityMatrix(CMatrix<Real> m) : DensityMatrix(std::move(m), Tolerance{}) {}

  DensityMatrix(CMatrix<Real> m, const Tolerance& tol) : rho_(std::move(m)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
      throw std::invalid_argument("density matrix must be square and non-empty");
    }
    const auto diag = diagnose_state(rho_);
    if (!(diag.hermiticity_error <= tol.hermiticity) || !(diag.trace_error <= tol.trace) ||
        !(diag.min_eigenvalue >= -tol.negativity)) {
      throw std::invalid_argument(describe("invalid density matrix", diag));
    }
  }

  /// Wraps the output of a propagation. Violations here indicate a numerical
  /// failure and raise NumericalError; nothing is clamped.
  static DensityMatrix from_propagated(CMatrix<Real> m, double tol = 1e-10) {
    const auto diag = diagnose_state(m);
    if (!m.allFinite() || !(diag.hermiticity_error <= tol) || !(diag.trace_error <= tol) ||
        !(diag.min_eigenvalue >= -tol)) {
      throw NumericalError(describe("propagated state left the physical domain", diag));
    }
    return DensityMatrix(std::move(m), Unchecked{});
  }

  static DensityMatrix pure(const CVector<Real>& psi) {
    const CVector<Real> n = psi / psi.norm();
    return DensityMatrix(CMatrix<Real>(n * n.adjoint()));
  }

  Eigen::Index dim() const { return rho_.rows(); }
  const CMatrix<Real>& matrix() const { return rho_; }
  Complex<Real> operator()(Eigen::Index i, Eigen::Index j) const { return rho_(i, j); }

  bool operator==(const DensityMatrix& other) const {
    return rho_.rows() == other.rho_.rows() && rho_.cols() == other.rho_.cols() &&
           rho_ == other.rho_;
  }

 private:
  struct Unchecked {};
  DensityMatrix(CMatrix<Real> m, Unchecked) : rho_(std::move(m)) {}

  static std::string describe(const char* what, const StateDiagnostics& d) {
    return std::string(what) + " (trace error " + std::to_string(d.trace_error) +
           ", hermiticity error " + std::to_string(d.hermiticity_error) +
           ", min eigenvalue " + std::to_string(d.min_eigenvalue) + ")";
  }

  CMatrix<Real> rho_;
};

enum class SuperoperatorKind { hamiltonian, dissipator, lindbladian, propagator, generic };

/// d^2 x d^2 matrix acting on column-stacked states.
template <typename Real>
struct Superoperator {
  CMatrix<Real> matrix;
  SuperoperatorKind kind = SuperoperatorKind::generic;

  Eigen::Index hilbert_dim() const {
    return static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(matrix.rows()))));
  }
};

/// Lindblad operators L_v with rates gamma_v (1/s).
template <typename Real>
class NoiseChannel {
 public:
  NoiseChannel() = default;

  NoiseChannel(std::vector<CMatrix<Real>> ops, std::vector<Real> rates)
      : ops_(std::move(ops)), rates_(std::move(rates)) {
    if (ops_.size() != rates_.size()) {
      throw std::invalid_argument("lindblad operator and rate lists differ in length");
    }
    for (std::size_t v = 0; v < ops_.size(); ++v) {
      check_term(ops_[v], rates_[v]);
    }
  }

  void add(CMatrix<Real> op, Real rate) {
    check_term(op, rate);
    ops_.push_back(std::move(op));
    rates_.push_back(rate);
  }

  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }
  const std::vector<CMatrix<Real>>& operators() const { return ops_; }
  const std::vector<Real>& rates() const { return rates_; }

  /// Hilbert dimension, or 0 for an empty channel.
  Eigen::Index dim() const { return ops_.empty() ? 0 : ops_.front().rows(); }

 private:
  void check_term(const CMatrix<Real>& op, Real rate) const {
    if (!(rate >= Real(0)) || !std::isfinite(static_cast<double>(rate))) {
      throw std::invalid_argument("lindblad rates must be finite and non-negative");
    }
    if (op.rows() != op.cols()) {
      throw std::invalid_argument("lindblad operators must be square");
    }
    if (!ops_.empty() && op.rows() != ops_.front().rows()) {
      throw std::invalid_argument("lindblad operators must share one dimension");
    }
  }

  std::vector<CMatrix<Real>> ops_;
  std::vector<Real> rates_;
};

template <typename Real>
CVector<Real> vectorize(const CMatrix<Real>& rho) {
  return rho.reshaped();
}

template <typename Real>
CVector<Real> vectorize(const DensityMatrix<Real>& rho) {
  return vectorize<Real>(rho.matrix());
}

template <typename Real>
CMatrix<Real> unvectorize(const CVector<Real>& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) {
    throw std::invalid_argument("vector length is not a perfect square");
  }
  return v.reshaped(d, d);
}

/// |U rho V>> = (V^T (x) U) |rho>>.
template <typename Real>
Superoperator<Real> sandwich_superop(const CMatrix<Real>& u, const CMatrix<Real>& v) {
  if (u.rows() != u.cols() || v.rows() != v.cols() || u.rows() != v.rows()) {
    throw std::invalid_argument("sandwich_superop: U and V must be square with equal size");
  }
  return {kron(v.transpose(), u), SuperoperatorKind::generic};
}

/// H^x = I (x) H - H^* (x) I, the commutator [H, .] in Liouville space.
template <typename Real>
Superoperator<Real> hamiltonian_superop(const CMatrix<Real>& h) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("hamiltonian_superop: H must be square");
  }
  const CMatrix<Real> id = CMatrix<Real>::Identity(h.rows(), h.cols());
  return {kron(id, h) - kron(h.conjugate(), id), SuperoperatorKind::hamiltonian};
}

/// Sum_v gamma_v (L rho L^dag - {L^dag L, rho}/2) in Liouville form.
///
/// The rate multiplies the whole bracket, so L = sigma_z/sqrt(2) at rate
/// gamma produces gamma/2 (sigma_z rho sigma_z - rho).
template <typename Real>
Superoperator<Real> dissipator_superop(const NoiseChannel<Real>& channel, Eigen::Index dim) {
  if (!channel.empty() && channel.dim() != dim) {
    throw std::invalid_argument("dissipator_superop: channel dimension mismatch");
  }
  const CMatrix<Real> id = CMatrix<Real>::Identity(dim, dim);
  CMatrix<Real> out = CMatrix<Real>::Zero(dim * dim, dim * dim);
  for (std::size_t v = 0; v < channel.size(); ++v) {
    const Real rate = channel.rates()[v];
    if (rate == Real(0)) continue;
    const CMatrix<Real>& l = channel.operators()[v];
    const CMatrix<Real> ldl = l.adjoint() * l;
    out += rate * (kron(CMatrix<Real>(l.conjugate()), l) - Real(0.5) * kron(id, ldl) -
                   Real(0.5) * kron(CMatrix<Real>(ldl.transpose()), id));
  }
  return {std::move(out), SuperoperatorKind::dissipator};
}

template <typename Real>
Superoperator<Real> dissipator_superop(const NoiseChannel<Real>& channel) {
  if (channel.empty()) {
    throw std::invalid_argument("dissipator_superop: empty channel needs an explicit dimension");
  }
  return dissipator_superop(channel, channel.dim());
}

/// L = -i H^x + Gamma.
template <typename Real>
Superoperator<Real> lindbladian(const CMatrix<Real>& h, const NoiseChannel<Real>& channel) {
  if (!channel.empty() && channel.dim() != h.rows()) {
    throw std::invalid_argument("lindbladian: Hamiltonian and channel dimensions differ");
  }
  const Complex<Real> minus_i(0, -1);
  CMatrix<Real> out = minus_i * hamiltonian_superop(h).matrix;
  out += dissipator_superop(channel, h.rows()).matrix;
  return {std::move(out), SuperoperatorKind::lindbladian};
}

/// max_j |sum_i L_{(ii), j}|: deviation of <<I| L from zero.
template <typename Real>
double trace_preservation_error(const Superoperator<Real>& l) {
  const Eigen::Index d = l.hilbert_dim();
  double worst = 0.0;
  for (Eigen::Index col = 0; col < l.matrix.cols(); ++col) {
    Complex<Real> s(0);
    for (Eigen::Index i = 0; i < d; ++i) s += l.matrix(i * d + i, col);
    worst = std::max(worst, static_cast<double>(std::abs(s)));
  }
  return worst;
}

}  // namespace qmetro
