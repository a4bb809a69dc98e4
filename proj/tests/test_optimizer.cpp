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
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "qmetro/optimizer.hpp"

using namespace qmetro;
using Eigen::VectorXd;

namespace {

double sphere(const VectorXd& x) { return x.squaredNorm(); }

double rosenbrock(const VectorXd& x) {
  return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
}

OptimizerOptions tight() {
  OptimizerOptions o;
  o.x_tol = 1e-8;
  o.f_tol = 1e-14;
  o.initial_step = 0.5;
  return o;
}

}  // namespace

TEST_CASE("sphere in five dimensions") {
  auto opts = tight();
  opts.max_evals = 5000;
  const auto r = nelder_mead(sphere, VectorXd::Constant(5, 1.0), opts);
  CHECK(r.converged);
  CHECK(r.f <= 1e-10);
  CHECK(r.x.cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("Rosenbrock") {
  auto opts = tight();
  opts.max_evals = 5000;
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto r = nelder_mead(rosenbrock, x0, opts);
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("non-smooth minimum") {
  auto opts = tight();
  const auto f = [](const VectorXd& x) { return std::abs(x(0) - 3.0); };
  const auto r = nelder_mead(f, VectorXd::Zero(1), opts);
  CHECK(r.x(0) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("multi-start finds the global minimum of a multimodal function") {
  const auto f = [](const VectorXd& x) { return std::sin(5.0 * x(0)) + 0.1 * x(0) * x(0); };
  double brute_x = 0.0, brute_f = 1e300;
  for (int i = 0; i <= 200000; ++i) {
    const double x = -5.0 + 10.0 * i / 200000.0;
    const double v = std::sin(5.0 * x) + 0.1 * x * x;
    if (v < brute_f) brute_f = v, brute_x = x;
  }
  auto opts = tight();
  opts.restarts = 20;
  opts.seed = 7;
  const auto r = multi_start(f, Bounds::symmetric(1, 5.0), opts);
  CHECK(r.best.f == doctest::Approx(brute_f).epsilon(1e-6));
  CHECK(r.best.x(0) == doctest::Approx(brute_x).epsilon(1e-3));
}

TEST_CASE("bounds are respected and clamped points are re-evaluated") {
  auto opts = tight();
  Bounds b = Bounds::symmetric(2, 1.0);
  std::vector<VectorXd> seen;
  const auto f = [&](const VectorXd& x) {
    seen.push_back(x);
    return std::pow(x(0) - 4.0, 2) + std::pow(x(1) + 4.0, 2);
  };
  const auto r = nelder_mead(f, VectorXd::Zero(2), opts, b);
  for (const auto& x : seen) CHECK(b.contains(x));
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x(1) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("evaluation accounting and budget") {
  auto opts = tight();
  opts.max_evals = 57;
  long calls = 0;
  const auto f = [&](const VectorXd& x) {
    ++calls;
    return rosenbrock(x);
  };
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto r = nelder_mead(f, x0, opts);
  CHECK(r.evals == calls);
  CHECK_FALSE(r.converged);
  CHECK(r.evals >= 57);
  CHECK(r.evals <= 57 + 3);

  OptimizerOptions defaults;
  CHECK(defaults.budget(40) == 8000);
}

TEST_CASE("best value is monotone across iterations") {
  auto opts = tight();
  opts.max_evals = 2000;
  double last = 1e300;
  bool monotone = true;
  int snapshots = 0;
  const auto obs = [&](const SimplexSnapshot& s) {
    ++snapshots;
    if (s.values.front() > last) monotone = false;
    last = s.values.front();
    for (std::size_t i = 1; i < s.values.size(); ++i)
      if (s.values[i] < s.values[i - 1]) monotone = false;
  };
  VectorXd x0(3);
  x0 << 2.0, -1.0, 0.5;
  nelder_mead([](const VectorXd& x) { return x.squaredNorm() + std::sin(3 * x(0)); }, x0, opts,
              std::nullopt, obs);
  CHECK(snapshots > 1);
  CHECK(monotone);
}

TEST_CASE("non-finite objective at the start is rejected") {
  const auto f = [](const VectorXd&) { return std::nan(""); };
  CHECK_THROWS_AS(nelder_mead(f, VectorXd::Zero(2), tight()), std::invalid_argument);
}

TEST_CASE("matches the recorded simplex trace") {
  std::ifstream in(std::string(QMETRO_FIXTURE_DIR) + "/nelder_mead_quadratic_trace.txt");
  REQUIRE(in.good());
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  REQUIRE(rows.size() == 4);

  OptimizerOptions opts;
  opts.initial_step = 0.5;
  std::vector<SimplexSnapshot> trace;
  VectorXd x0(2);
  x0 << 1.0, 1.0;
  nelder_mead(sphere, x0, opts, std::nullopt,
              [&](const SimplexSnapshot& s) { trace.push_back(s); });
  REQUIRE(trace.size() >= rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::istringstream row(rows[i]);
    int iteration = 0;
    std::string step;
    row >> iteration >> step;
    CAPTURE(i);
    CHECK(trace[i].iteration == iteration);
    CHECK(std::string(to_string(trace[i].step)) == step);
    for (int v = 0; v < 3; ++v) {
      double x = 0, y = 0, f = 0;
      row >> x >> y >> f;
      CHECK(trace[i].vertices[v](0) == x);
      CHECK(trace[i].vertices[v](1) == y);
      CHECK(trace[i].values[v] == f);
    }
  }
}

TEST_CASE("multi-start is deterministic and independent of worker count") {
  const auto f = [](const VectorXd& x) {
    return std::sin(3.0 * x(0)) * std::cos(2.0 * x(1)) + 0.05 * x.squaredNorm();
  };
  auto opts = tight();
  opts.restarts = 6;
  opts.seed = 1234;
  const auto a = multi_start(f, Bounds::symmetric(2, 4.0), opts);
  const auto b = multi_start(f, Bounds::symmetric(2, 4.0), opts);
  opts.workers = 3;
  const auto c = multi_start(f, Bounds::symmetric(2, 4.0), opts);
  for (const auto* other : {&b, &c}) {
    CHECK(other->best.x == a.best.x);
    CHECK(other->best.f == a.best.f);
    CHECK(other->best_restart == a.best_restart);
    CHECK(other->total_evals == a.total_evals);
  }
  long sum = 0;
  for (const auto& run : a.runs) sum += run.evals;
  CHECK(sum == a.total_evals);
  CHECK(a.runs.size() == 6);

  opts.seed = 1235;
  opts.workers = 1;
  const auto d = multi_start(f, Bounds::symmetric(2, 4.0), opts);
  CHECK(d.runs[1].x != a.runs[1].x);
}

TEST_CASE("first restart starts from the preset point") {
  auto opts = tight();
  opts.restarts = 2;
  VectorXd start(2);
  start << 0.3, -0.2;
  std::vector<VectorXd> firsts;
  const auto f = [&](const VectorXd& x) {
    if (firsts.empty()) firsts.push_back(x);
    return x.squaredNorm();
  };
  multi_start(f, Bounds::symmetric(2, 1.0), opts, {start});
  REQUIRE_FALSE(firsts.empty());
  CHECK(firsts.front() == start);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("option validation") {
  OptimizerOptions o;
  o.restarts = 0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = {};
  o.contraction = 1.5;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = {};
  o.x_tol = -1.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}
