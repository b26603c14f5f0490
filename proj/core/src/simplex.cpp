#include "nuqs/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace nuqs {

namespace {

struct Vertex {
  std::vector<double> x;
  double f = 0.0;
};

class SimplexRun {
 public:
  SimplexRun(const Objective& objective, const SimplexOptions& options)
      : objective_(objective), options_(options) {}

  SimplexResult run(std::span<const double> start,
                    std::span<const double> steps) {
    const std::size_t n = start.size();
    std::vector<Vertex> simplex(n + 1);
    simplex[0].x.assign(start.begin(), start.end());
    project(simplex[0].x);
    for (std::size_t i = 0; i < n; ++i) {
      auto& x = simplex[i + 1].x;
      x = simplex[0].x;
      x[i] += steps[i];
      if (!options_.periodic[i] && x[i] > options_.upper[i]) {
        x[i] = simplex[0].x[i] - steps[i];
      }
      project(x);
    }
    for (auto& vertex : simplex) vertex.f = evaluate(vertex.x);

    SimplexResult result;
    std::vector<double> centroid(n);
    for (result.iterations = 0; result.iterations < options_.max_iterations;
         ++result.iterations) {
      std::stable_sort(simplex.begin(), simplex.end(),
                       [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
      if (diameter(simplex) < options_.diameter_tol) {
        result.converged = true;
        break;
      }

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].x[i];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      Vertex& worst = simplex[n];
      const Vertex reflected = along(centroid, worst.x, -1.0);
      if (reflected.f < simplex[0].f) {
        Vertex expanded = along(centroid, worst.x, -2.0);
        worst = expanded.f < reflected.f ? std::move(expanded) : reflected;
      } else if (reflected.f < simplex[n - 1].f) {
        worst = reflected;
      } else {
        const bool outside = reflected.f < worst.f;
        Vertex contracted = outside ? along(centroid, worst.x, -0.5)
                                    : along(centroid, worst.x, 0.5);
        if (contracted.f < std::min(reflected.f, worst.f)) {
          worst = std::move(contracted);
        } else {
          shrink(simplex);
        }
      }
    }
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    result.x = simplex[0].x;
    result.value = simplex[0].f;
    result.evaluations = evaluations_;
    return result;
  }

 private:
  void project(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!options_.periodic[i]) {
        x[i] = std::clamp(x[i], options_.lower[i], options_.upper[i]);
      }
    }
  }

  double evaluate(const std::vector<double>& x) {
    ++evaluations_;
    const double f = objective_(x);
    return std::isnan(f) ? HUGE_VAL : f;
  }

  // centroid + t (point - centroid), projected and evaluated.
  Vertex along(const std::vector<double>& centroid,
               const std::vector<double>& point, double t) {
    Vertex v;
    v.x.resize(centroid.size());
    for (std::size_t i = 0; i < centroid.size(); ++i) {
      v.x[i] = centroid[i] + t * (point[i] - centroid[i]);
    }
    project(v.x);
    v.f = evaluate(v.x);
    return v;
  }

  void shrink(std::vector<Vertex>& simplex) {
    const std::vector<double> best = simplex[0].x;
    for (std::size_t k = 1; k < simplex.size(); ++k) {
      for (std::size_t i = 0; i < best.size(); ++i) {
        simplex[k].x[i] = best[i] + 0.5 * (simplex[k].x[i] - best[i]);
      }
      project(simplex[k].x);
      simplex[k].f = evaluate(simplex[k].x);
    }
  }

  static double diameter(const std::vector<Vertex>& simplex) {
    double d = 0.0;
    for (std::size_t k = 1; k < simplex.size(); ++k) {
      for (std::size_t i = 0; i < simplex[0].x.size(); ++i) {
        d = std::max(d, std::abs(simplex[k].x[i] - simplex[0].x[i]));
      }
    }
    return d;
  }

  const Objective& objective_;
  const SimplexOptions& options_;
  int evaluations_ = 0;
};

}  // namespace

SimplexResult minimize_simplex(const Objective& objective,
                               std::span<const double> start,
                               const SimplexOptions& options) {
  SimplexRun runner(objective, options);
  SimplexResult best = runner.run(start, options.initial_step);

  std::vector<double> restart_step(options.initial_step.begin(),
                                   options.initial_step.end());
  for (double& s : restart_step) s *= 0.1;
  int iterations = best.iterations;
  for (int restart = 0; restart < options.max_restarts; ++restart) {
    SimplexResult next = runner.run(best.x, restart_step);
    iterations += next.iterations;
    const bool improved =
        next.value < best.value - 1e-13 * std::abs(best.value);
    if (next.value <= best.value) best = std::move(next);
    if (!improved) break;
  }
  best.iterations = iterations;
  return best;
}

}  // namespace nuqs
