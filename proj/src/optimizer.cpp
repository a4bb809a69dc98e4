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

#include "qmetro/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace qmetro {

void OptimizerOptions::validate() const {
  if (!(reflection > 0.0)) throw std::invalid_argument("reflection coefficient must be > 0");
  if (!(expansion > 1.0)) throw std::invalid_argument("expansion coefficient must be > 1");
  if (!(contraction > 0.0 && contraction < 1.0)) {
    throw std::invalid_argument("contraction coefficient must lie in (0, 1)");
  }
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw std::invalid_argument("shrink coefficient must lie in (0, 1)");
  }
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (max_evals < 0) throw std::invalid_argument("max_evals must be >= 0");
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be > 0");
  if (!(x_tol >= 0.0) || !(f_tol >= 0.0)) throw std::invalid_argument("tolerances must be >= 0");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

Bounds Bounds::symmetric(Eigen::Index n, double half_width) {
  return {Eigen::VectorXd::Constant(n, -half_width), Eigen::VectorXd::Constant(n, half_width)};
}

bool Bounds::contains(const Eigen::VectorXd& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

Eigen::VectorXd Bounds::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

std::string_view to_string(SimplexStep step) {
  switch (step) {
    case SimplexStep::initial:
      return "initial";
    case SimplexStep::reflect:
      return "reflect";
    case SimplexStep::expand:
      return "expand";
    case SimplexStep::contract_outside:
      return "contract_outside";
    case SimplexStep::contract_inside:
      return "contract_inside";
    case SimplexStep::shrink:
      return "shrink";
  }
  return "unknown";
}

namespace {

class Simplex {
 public:
  Simplex(const Objective& objective, const std::optional<Bounds>& bounds)
      : objective_(objective), bounds_(bounds) {}

  // Clamps into the box, then evaluates. Non-finite values rank last.
  double eval(Eigen::VectorXd& x) {
    if (bounds_) x = bounds_->clamp(x);
    ++evals_;
    const double f = objective_(x);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  }

  void push(Eigen::VectorXd x, double f) {
    vertices.push_back(std::move(x));
    values.push_back(f);
  }

  // Stable ordering: equal values keep their current relative order.
  void sort() {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> v;
    std::vector<double> f;
    v.reserve(idx.size());
    f.reserve(idx.size());
    for (auto i : idx) {
      v.push_back(std::move(vertices[i]));
      f.push_back(values[i]);
    }
    vertices = std::move(v);
    values = std::move(f);
  }

  long evals() const { return evals_; }

  std::vector<Eigen::VectorXd> vertices;
  std::vector<double> values;

 private:
  const Objective& objective_;
  const std::optional<Bounds>& bounds_;
  long evals_ = 0;
};

}  // namespace

NelderMeadResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0,
                             const OptimizerOptions& options,
                             const std::optional<Bounds>& bounds,
                             const SimplexObserver& observer) {
  options.validate();
  const Eigen::Index n = x0.size();
  if (n < 1) throw std::invalid_argument("nelder_mead: need at least one variable");
  if (bounds && bounds->size() != n) {
    throw std::invalid_argument("nelder_mead: bounds dimension mismatch");
  }
  const long budget = options.budget(n);

  Simplex s(objective, bounds);
  {
    Eigen::VectorXd x = x0;
    const double f = s.eval(x);
    s.push(std::move(x), f);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd x = s.vertices.front();
    x(i) += options.initial_step;
    if (bounds && x(i) > bounds->upper(i)) x(i) = s.vertices.front()(i) - options.initial_step;
    const double f = s.eval(x);
    s.push(std::move(x), f);
  }
  for (double f : s.values) {
    if (!std::isfinite(f)) {
      throw std::invalid_argument("nelder_mead: objective is not finite on the initial simplex");
    }
  }
  s.sort();

  int iteration = 0;
  auto notify = [&](SimplexStep step) {
    if (observer) observer({iteration, step, s.vertices, s.values, s.evals()});
  };
  notify(SimplexStep::initial);

  const auto worst = static_cast<std::size_t>(n);
  bool converged = false;
  while (true) {
    double diameter = 0.0;
    double spread = 0.0;
    for (std::size_t i = 1; i <= worst; ++i) {
      diameter = std::max(diameter, (s.vertices[i] - s.vertices[0]).cwiseAbs().maxCoeff());
      spread = std::max(spread, std::abs(s.values[i] - s.values[0]));
    }
    if (diameter <= options.x_tol &&
        spread <= options.f_tol * std::max(1.0, std::abs(s.values[0]))) {
      converged = true;
      break;
    }
    if (s.evals() >= budget) break;
    ++iteration;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < worst; ++i) centroid += s.vertices[i];
    centroid /= static_cast<double>(n);

    Eigen::VectorXd xr = centroid + options.reflection * (centroid - s.vertices[worst]);
    const double fr = s.eval(xr);
    SimplexStep step = SimplexStep::reflect;

    if (fr < s.values[0]) {
      Eigen::VectorXd xe = centroid + options.expansion * (xr - centroid);
      const double fe = s.eval(xe);
      if (fe < fr) {
        s.vertices[worst] = std::move(xe);
        s.values[worst] = fe;
        step = SimplexStep::expand;
      } else {
        s.vertices[worst] = std::move(xr);
        s.values[worst] = fr;
      }
    } else if (fr < s.values[worst - 1]) {
      s.vertices[worst] = std::move(xr);
      s.values[worst] = fr;
    } else {
      bool do_shrink = false;
      if (fr < s.values[worst]) {
        Eigen::VectorXd xc = centroid + options.contraction * (xr - centroid);
        const double fc = s.eval(xc);
        if (fc <= fr) {
          s.vertices[worst] = std::move(xc);
          s.values[worst] = fc;
          step = SimplexStep::contract_outside;
        } else {
          do_shrink = true;
        }
      } else {
        Eigen::VectorXd xcc = centroid + options.contraction * (s.vertices[worst] - centroid);
        const double fcc = s.eval(xcc);
        if (fcc < s.values[worst]) {
          s.vertices[worst] = std::move(xcc);
          s.values[worst] = fcc;
          step = SimplexStep::contract_inside;
        } else {
          do_shrink = true;
        }
      }
      if (do_shrink) {
        step = SimplexStep::shrink;
        for (std::size_t i = 1; i <= worst; ++i) {
          Eigen::VectorXd x = s.vertices[0] + options.shrink * (s.vertices[i] - s.vertices[0]);
          s.values[i] = s.eval(x);
          s.vertices[i] = std::move(x);
        }
      }
    }
    s.sort();
    notify(step);
  }

  return {s.vertices[0], s.values[0], s.evals(), iteration, converged};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

MultiStartResult multi_start(const Objective& objective, const Bounds& bounds,
                             const OptimizerOptions& options,
                             const std::vector<Eigen::VectorXd>& preset_starts) {
  options.validate();
  const Eigen::Index n = bounds.size();
  if (n < 1) throw std::invalid_argument("multi_start: empty bounds");
  if ((bounds.upper.array() < bounds.lower.array()).any()) {
    throw std::invalid_argument("multi_start: lower bound exceeds upper bound");
  }

  const auto restarts = static_cast<std::size_t>(options.restarts);
  std::vector<Eigen::VectorXd> starts;
  starts.reserve(restarts);
  if (preset_starts.empty()) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    if (bounds.contains(zero)) starts.push_back(zero);
  } else {
    for (const auto& s : preset_starts) {
      if (starts.size() == restarts) break;
      if (s.size() != n) throw std::invalid_argument("multi_start: preset start has wrong size");
      starts.push_back(bounds.clamp(s));
    }
  }
  for (std::size_t r = starts.size(); r < restarts; ++r) {
    std::mt19937_64 rng(derive_seed(options.seed, r));
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      std::uniform_real_distribution<double> u(bounds.lower(i), bounds.upper(i));
      x(i) = u(rng);
    }
    starts.push_back(std::move(x));
  }

  std::vector<NelderMeadResult> runs(restarts);
  const std::optional<Bounds> box = bounds;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(options.workers), restarts);
  if (workers <= 1) {
    for (std::size_t r = 0; r < restarts; ++r) {
      runs[r] = nelder_mead(objective, starts[r], options, box);
    }
  } else {
    std::vector<std::exception_ptr> errors(restarts);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < restarts; r += workers) {
          try {
            runs[r] = nelder_mead(objective, starts[r], options, box);
          } catch (...) {
            errors[r] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  MultiStartResult out;
  out.runs = std::move(runs);
  for (std::size_t r = 0; r < restarts; ++r) {
    out.total_evals += out.runs[r].evals;
    if (r == 0 || out.runs[r].f < out.best.f) {
      out.best = out.runs[r];
      out.best_restart = static_cast<int>(r);
    }
  }
  return out;
}

}  // namespace qmetro
