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

// Nelder-Mead simplex search and a seeded multi-start driver.

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qmetro {

struct OptimizerOptions {
  /// Objective-call budget; 0 means 200 * n. Checked at the start of each
  /// iteration, so the final iteration may overrun by at most n + 1 calls.
  long max_evals = 0;
  double x_tol = 1e-6;  // infinity-norm simplex diameter
  double f_tol = 1e-8;  // spread, relative to max(1, |f_best|)
  int restarts = 1;
  std::uint64_t seed = 0;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_step = 0.05;
  /// Concurrent restarts; results do not depend on this.
  int workers = 1;

  void validate() const;
  long budget(Eigen::Index n) const { return max_evals > 0 ? max_evals : 200 * n; }
};

/// Axis-aligned box; candidates are clamped into it before evaluation.
struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Bounds symmetric(Eigen::Index n, double half_width);
  Eigen::Index size() const { return lower.size(); }
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
};

enum class SimplexStep { initial, reflect, expand, contract_outside, contract_inside, shrink };

std::string_view to_string(SimplexStep step);

/// Simplex state after one iteration, vertices sorted best first.
struct SimplexSnapshot {
  int iteration = 0;
  SimplexStep step = SimplexStep::initial;
  std::vector<Eigen::VectorXd> vertices;
  std::vector<double> values;
  long evals = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
using SimplexObserver = std::function<void(const SimplexSnapshot&)>;

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  long evals = 0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes the objective from x0. Throws std::invalid_argument when the
/// objective is not finite on the initial simplex.
NelderMeadResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0,
                             const OptimizerOptions& options,
                             const std::optional<Bounds>& bounds = std::nullopt,
                             const SimplexObserver& observer = {});

struct MultiStartResult {
  NelderMeadResult best;
  int best_restart = 0;
  long total_evals = 0;
  std::vector<NelderMeadResult> runs;
};

/// Runs options.restarts independent searches and keeps the best (lowest
/// restart index on ties). Starting points: `preset_starts` in order (or the
/// zero vector when none are given and it lies in the box), then uniform
/// draws from the box using a per-restart generator derived from the seed.
MultiStartResult multi_start(const Objective& objective, const Bounds& bounds,
                             const OptimizerOptions& options,
                             const std::vector<Eigen::VectorXd>& preset_starts = {});

/// Deterministic generator for restart `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace qmetro
