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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qmetro {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when a computed quantity leaves its physical domain (trace drift,
/// negative eigenvalues, non-finite entries) beyond tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed configuration files or unknown names.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace pauli {

template <typename Real = double>
CMatrix<Real> identity(Eigen::Index dim = 2) {
  return CMatrix<Real>::Identity(dim, dim);
}

template <typename Real = double>
CMatrix<Real> x() {
  CMatrix<Real> m(2, 2);
  m << Real(0), Real(1), Real(1), Real(0);
  return m;
}

template <typename Real = double>
CMatrix<Real> y() {
  const Complex<Real> i(0, 1);
  CMatrix<Real> m(2, 2);
  m << Real(0), -i, i, Real(0);
  return m;
}

template <typename Real = double>
CMatrix<Real> z() {
  CMatrix<Real> m(2, 2);
  m << Real(1), Real(0), Real(0), Real(-1);
  return m;
}

/// sigma_- = (sigma_x - i sigma_y) / 2, maps |0> to |1>.
template <typename Real = double>
CMatrix<Real> lowering() {
  CMatrix<Real> m = CMatrix<Real>::Zero(2, 2);
  m(1, 0) = Real(1);
  return m;
}

/// sigma_+ = (sigma_x + i sigma_y) / 2.
template <typename Real = double>
CMatrix<Real> raising() {
  CMatrix<Real> m = CMatrix<Real>::Zero(2, 2);
  m(0, 1) = Real(1);
  return m;
}

}  // namespace pauli

/// Kronecker product a (x) b.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>
kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Result = Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Result out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::RealScalar(0) : m.cwiseAbs().maxCoeff();
}

/// max |m - m^dagger|
template <typename Derived>
typename Derived::RealScalar hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  return max_abs(m - m.adjoint());
}

}  // namespace qmetro
