#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nuqs {

/// Box-constrained Nelder-Mead. Non-periodic coordinates are projected onto
/// [lower, upper] after every simplex move; periodic coordinates are left
/// free and the objective is expected to handle them.
struct SimplexOptions {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> periodic;
  std::vector<double> initial_step;
  double diameter_tol = 1e-10;
  int max_iterations = 2000;
  /// Re-initialise around the best vertex after convergence, up to this many
  /// times, while doing so still improves the objective.
  int max_restarts = 2;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

SimplexResult minimize_simplex(const Objective& objective,
                               std::span<const double> start,
                               const SimplexOptions& options);

}  // namespace nuqs
