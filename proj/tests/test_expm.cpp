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

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qmetro/expm.hpp"
#include "qmetro/types.hpp"

using namespace qmetro;
using oracle::Mat;

TEST_CASE("exponential of zero is the identity") {
  for (int d : {1, 2, 4, 16}) CHECK(expm(Mat(Mat::Zero(d, d))) == Mat::Identity(d, d));
}

TEST_CASE("diagonal matrices exponentiate entrywise") {
  Mat a = Mat::Zero(3, 3);
  a(0, 0) = {-2.0, 0.5};
  a(1, 1) = {0.1, -3.0};
  a(2, 2) = {-40.0, 7.0};
  const Mat e = expm(a);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(e(i, i) - std::exp(a(i, i))) <= 1e-13);
}

TEST_CASE("qubit rotation matches the closed form") {
  const std::complex<double> i(0, 1);
  for (double theta : {0.01, 0.7, 3.0, 25.0, 400.0}) {
    const Mat got = expm(Mat(-i * theta / 2.0 * pauli::x()));
    const Mat want =
        std::cos(theta / 2.0) * pauli::identity() - i * std::sin(theta / 2.0) * pauli::x();
    CHECK(max_abs(got - want) <= 1e-12 * std::max(1.0, theta));
  }
}

TEST_CASE("agrees with the Taylor oracle across Pade degrees") {
  std::mt19937_64 rng(99);
  // Norms chosen to land in each degree band and in the scaled regime.
  for (double scale : {1e-3, 0.1, 0.5, 1.5, 4.0, 30.0}) {
    for (int d : {2, 4, 16}) {
      Mat a = oracle::random_matrix(d, rng);
      a *= scale / a.cwiseAbs().colwise().sum().maxCoeff();
      const Mat got = expm(a);
      const Mat want = oracle::taylor_expm(a);
      CHECK(max_abs(got - want) <= 1e-12 * std::max(1.0, max_abs(want)));
    }
  }
}

TEST_CASE("exp(A) exp(-A) is the identity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat a = oracle::random_matrix(4, rng);
    CHECK(max_abs(Mat(expm(a) * expm(Mat(-a))) - Mat::Identity(4, 4)) <= 1e-11);
  }
}

TEST_CASE("exponentials of anti-Hermitian matrices are unitary") {
  std::mt19937_64 rng(17);
  const std::complex<double> i(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat h = oracle::random_hermitian(4, rng, 20.0);
    const Mat u = expm(Mat(-i * h));
    CHECK(max_abs(Mat(u.adjoint() * u) - Mat::Identity(4, 4)) <= 1e-12);
  }
}

TEST_CASE("works for long double") {
  using LMat = CMatrix<long double>;
  LMat a = LMat::Zero(2, 2);
  a(0, 1) = 1.0L;
  a(1, 0) = -1.0L;
  const LMat e = expm(a);
  CHECK(std::abs(e(0, 0).real() - std::cos(1.0L)) < 1e-15L);
  CHECK(std::abs(e(0, 1).real() - std::sin(1.0L)) < 1e-15L);
}
