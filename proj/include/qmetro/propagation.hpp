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

// Piecewise-constant controlled evolution: |rho(T)>> = prod_k exp(L[k] dt) |rho(0)>>
// with L[k] built from H[k] = omega * G + sum_l u_l[k] H_l.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmetro/channels.hpp"
#include "qmetro/expm.hpp"
#include "qmetro/liouville.hpp"

namespace qmetro {

/// K x L grid of control amplitudes (rad/s) over total time T (s).
template <typename Real = double>
class ControlSchedule {
 public:
  ControlSchedule(RMatrix<Real> amplitudes, Real total_time,
                  std::optional<Real> amplitude_bound = std::nullopt)
      : amplitudes_(std::move(amplitudes)), total_time_(total_time), bound_(amplitude_bound) {
    if (amplitudes_.rows() < 1) throw std::invalid_argument("control schedule needs K >= 1");
    if (!(total_time_ > Real(0)) || !std::isfinite(static_cast<double>(total_time_))) {
      throw std::invalid_argument("control schedule needs a finite total time T > 0");
    }
    if (!amplitudes_.allFinite()) {
      throw std::invalid_argument("control amplitudes must be finite");
    }
    if (bound_ && amplitudes_.size() > 0 && amplitudes_.cwiseAbs().maxCoeff() > *bound_) {
      throw std::invalid_argument("control amplitude exceeds the configured bound");
    }
  }

  static ControlSchedule zeros(Eigen::Index slices, Eigen::Index fields, Real total_time) {
    return ControlSchedule(RMatrix<Real>::Zero(slices, fields), total_time);
  }

  static ControlSchedule constant(Eigen::Index slices, const RVector<Real>& values,
                                  Real total_time) {
    RMatrix<Real> grid(slices, values.size());
    for (Eigen::Index k = 0; k < slices; ++k) grid.row(k) = values.transpose();
    return ControlSchedule(std::move(grid), total_time);
  }

  /// Row-major flattening u = (u_1[1], ..., u_L[1], u_1[2], ...).
  static ControlSchedule from_flat(const RVector<Real>& flat, Eigen::Index slices,
                                   Eigen::Index fields, Real total_time) {
    if (flat.size() != slices * fields) {
      throw std::invalid_argument("flat control vector has the wrong length");
    }
    RMatrix<Real> grid(slices, fields);
    for (Eigen::Index k = 0; k < slices; ++k)
      for (Eigen::Index l = 0; l < fields; ++l) grid(k, l) = flat(k * fields + l);
    return ControlSchedule(std::move(grid), total_time);
  }

  RVector<Real> flat() const {
    RVector<Real> out(amplitudes_.size());
    for (Eigen::Index k = 0; k < slices(); ++k)
      for (Eigen::Index l = 0; l < fields(); ++l) out(k * fields() + l) = amplitudes_(k, l);
    return out;
  }

  Eigen::Index slices() const { return amplitudes_.rows(); }
  Eigen::Index fields() const { return amplitudes_.cols(); }
  Real total_time() const { return total_time_; }
  Real slice_duration() const { return total_time_ / Real(slices()); }
  const RMatrix<Real>& amplitudes() const { return amplitudes_; }
  Real amplitude(Eigen::Index k, Eigen::Index l) const { return amplitudes_(k, l); }
  std::optional<Real> amplitude_bound() const { return bound_; }

 private:
  RMatrix<Real> amplitudes_;
  Real total_time_;
  std::optional<Real> bound_;
};

/// Liouville-space generators of a model, assembled once and reused for every
/// slice, frequency and schedule.
template <typename Real = double>
class Evolver {
 public:
  explicit Evolver(const EncodingModel<Real>& model) : dim_(model.dim()), omega0_(model.omega0) {
    model.validate();
    const Complex<Real> minus_i(0, -1);
    drift_ = minus_i * hamiltonian_superop(model.drift_generator).matrix;
    controls_.reserve(model.control_hams.size());
    for (const auto& h : model.control_hams) {
      controls_.push_back(minus_i * hamiltonian_superop(h).matrix);
    }
    dissipator_ = dissipator_superop(model.channel, dim_).matrix;
  }

  Eigen::Index dim() const { return dim_; }
  Real omega0() const { return omega0_; }
  std::size_t num_controls() const { return controls_.size(); }

  /// L[k] for a given frequency (k is 0-based here).
  Superoperator<Real> slice_lindbladian(const ControlSchedule<Real>& schedule, Eigen::Index k,
                                        Real omega) const {
    check_schedule(schedule);
    CMatrix<Real> l = dissipator_ + omega * drift_;
    for (std::size_t c = 0; c < controls_.size(); ++c) {
      const Real u = schedule.amplitude(k, static_cast<Eigen::Index>(c));
      if (u != Real(0)) l += u * controls_[c];
    }
    return {std::move(l), SuperoperatorKind::lindbladian};
  }

  Superoperator<Real> slice_propagator(const ControlSchedule<Real>& schedule, Eigen::Index k,
                                       Real omega) const {
    CMatrix<Real> l = slice_lindbladian(schedule, k, omega).matrix;
    l *= schedule.slice_duration();
    return {expm(l), SuperoperatorKind::propagator};
  }

  /// Unchecked vectorized propagation over all slices.
  CVector<Real> propagate(const ControlSchedule<Real>& schedule, const CVector<Real>& rho0,
                          Real omega) const {
    CVector<Real> v = rho0;
    for (Eigen::Index k = 0; k < schedule.slices(); ++k) {
      v = slice_propagator(schedule, k, omega).matrix * v;
    }
    return v;
  }

  DensityMatrix<Real> evolve(const ControlSchedule<Real>& schedule,
                             const DensityMatrix<Real>& rho0, Real omega) const {
    check_state(rho0);
    return DensityMatrix<Real>::from_propagated(
        unvectorize<Real>(propagate(schedule, vectorize(rho0), omega)));
  }

  DensityMatrix<Real> evolve(const ControlSchedule<Real>& schedule,
                             const DensityMatrix<Real>& rho0) const {
    return evolve(schedule, rho0, omega0_);
  }

  std::vector<DensityMatrix<Real>> trajectory(const ControlSchedule<Real>& schedule,
                                              const DensityMatrix<Real>& rho0,
                                              Real omega) const {
    check_state(rho0);
    std::vector<DensityMatrix<Real>> out;
    out.reserve(static_cast<std::size_t>(schedule.slices()) + 1);
    out.push_back(rho0);
    CVector<Real> v = vectorize(rho0);
    for (Eigen::Index k = 0; k < schedule.slices(); ++k) {
      v = slice_propagator(schedule, k, omega).matrix * v;
      out.push_back(DensityMatrix<Real>::from_propagated(unvectorize<Real>(v)));
    }
    return out;
  }

 private:
  void check_schedule(const ControlSchedule<Real>& schedule) const {
    if (static_cast<std::size_t>(schedule.fields()) != controls_.size()) {
      throw std::invalid_argument("schedule has " + std::to_string(schedule.fields()) +
                                  " fields but the model has " +
                                  std::to_string(controls_.size()) + " controls");
    }
  }
  void check_state(const DensityMatrix<Real>& rho0) const {
    if (rho0.dim() != dim_) throw std::invalid_argument("initial state dimension mismatch");
  }

  Eigen::Index dim_;
  Real omega0_;
  CMatrix<Real> drift_;
  std::vector<CMatrix<Real>> controls_;
  CMatrix<Real> dissipator_;
};

/// exp(L[k] dt) for the 1-based slice index k.
template <typename Real>
Superoperator<Real> slice_propagator(const EncodingModel<Real>& model,
                                     const ControlSchedule<Real>& schedule, Eigen::Index k) {
  if (k < 1 || k > schedule.slices()) {
    throw std::out_of_range("slice index " + std::to_string(k) + " outside [1, " +
                            std::to_string(schedule.slices()) + "]");
  }
  return Evolver<Real>(model).slice_propagator(schedule, k - 1, model.omega0);
}

template <typename Real>
DensityMatrix<Real> evolve(const EncodingModel<Real>& model, const ControlSchedule<Real>& schedule,
                           const DensityMatrix<Real>& rho0) {
  return Evolver<Real>(model).evolve(schedule, rho0);
}

/// States after each slice, starting with rho0 (length K + 1).
template <typename Real>
std::vector<DensityMatrix<Real>> evolve_trajectory(const EncodingModel<Real>& model,
                                                   const ControlSchedule<Real>& schedule,
                                                   const DensityMatrix<Real>& rho0) {
  return Evolver<Real>(model).trajectory(schedule, rho0, model.omega0);
}

}  // namespace qmetro
