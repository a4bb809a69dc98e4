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

// Matrix exponential by scaling and squaring with diagonal Pade
// approximants of degree 3, 5, 7, 9 or 13 (Higham 2005). Degree and scaling
// are picked from the 1-norm so the backward error stays below unit
// roundoff in double precision.

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace qmetro {

namespace detail {

// Theta thresholds for m = 3, 5, 7, 9, 13.
inline constexpr std::array<double, 5> kPadeTheta = {
    1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
    2.097847961257068e0, 5.371920351148152e0};

inline constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

template <typename Matrix>
void pade_low(const Matrix& a, int m, Matrix& u, Matrix& v) {
  using Scalar = typename Matrix::Scalar;
  static constexpr double b3[] = {120.0, 60.0, 12.0, 1.0};
  static constexpr double b5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr double b7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                  25200.0,    1512.0,    56.0,      1.0};
  static constexpr double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                  30270240.0,    2162160.0,    110880.0,     3960.0,
                                  90.0,          1.0};
  const double* b = m == 3 ? b3 : m == 5 ? b5 : m == 7 ? b7 : b9;

  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  const Matrix a2 = a * a;
  Matrix power = a2;
  Matrix odd = Scalar(b[1]) * id;
  Matrix even = Scalar(b[0]) * id;
  for (int k = 2; k <= m; k += 2) {
    odd += Scalar(b[k + 1]) * power;
    even += Scalar(b[k]) * power;
    if (k + 2 <= m) power = power * a2;
  }
  u.noalias() = a * odd;
  v = even;
}

template <typename Matrix>
void pade13(const Matrix& a, Matrix& u, Matrix& v) {
  using Scalar = typename Matrix::Scalar;
  const auto& b = kPade13;
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  Matrix inner = Scalar(b[13]) * a6 + Scalar(b[11]) * a4 + Scalar(b[9]) * a2;
  Matrix tmp = a6 * inner;
  tmp += Scalar(b[7]) * a6 + Scalar(b[5]) * a4 + Scalar(b[3]) * a2 + Scalar(b[1]) * id;
  u.noalias() = a * tmp;
  inner = Scalar(b[12]) * a6 + Scalar(b[10]) * a4 + Scalar(b[8]) * a2;
  v = a6 * inner;
  v += Scalar(b[6]) * a6 + Scalar(b[4]) * a4 + Scalar(b[2]) * a2 + Scalar(b[0]) * id;
}

}  // namespace detail

/// exp(A) for a dense square matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> expm(
    const Eigen::MatrixBase<Derived>& input) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Scalar = typename Derived::Scalar;
  eigen_assert(input.rows() == input.cols());

  const Matrix a = input;
  if (a.size() == 0) return a;
  const double norm1 = static_cast<double>(a.cwiseAbs().colwise().sum().maxCoeff());

  Matrix u(a.rows(), a.cols());
  Matrix v(a.rows(), a.cols());
  int squarings = 0;

  constexpr std::array<int, 4> low_degrees = {3, 5, 7, 9};
  bool done = false;
  for (std::size_t i = 0; i < low_degrees.size(); ++i) {
    if (norm1 <= detail::kPadeTheta[i]) {
      detail::pade_low(a, low_degrees[i], u, v);
      done = true;
      break;
    }
  }
  if (!done) {
    const double ratio = norm1 / detail::kPadeTheta[4];
    squarings = ratio > 1.0 ? static_cast<int>(std::ceil(std::log2(ratio))) : 0;
    const Matrix scaled = a * Scalar(std::ldexp(1.0, -squarings));
    detail::pade13(scaled, u, v);
  }

  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace qmetro
