#include "nuqs/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "nuqs/simplex.hpp"
#include "parallel.hpp"

namespace nuqs {

std::string_view to_string(StateFamily family) noexcept {
  return family == StateFamily::CoherentOnly ? "coherent" : "gaussian";
}

StateFamily parse_family(std::string_view text) {
  if (text == "coherent") return StateFamily::CoherentOnly;
  if (text == "gaussian" || text == "squeezed") return StateFamily::Gaussian;
  throw Error(ErrorCode::InvalidConfig,
              "family must be 'coherent' or 'gaussian', got '" +
                  std::string(text) + "'");
}

namespace {

constexpr std::array<std::pair<Regime, std::string_view>, 6> kRegimeNames = {{
    {Regime::SqueezedVacuumOffRes, "squeezed_vacuum_off_res"},
    {Regime::SqueezedVacuumRes, "squeezed_vacuum_res"},
    {Regime::SqueezedCoherentOffRes, "squeezed_coherent_off_res"},
    {Regime::SqueezedCoherentRes, "squeezed_coherent_res"},
    {Regime::CoherentOffRes, "coherent_off_res"},
    {Regime::CoherentRes, "coherent_res"},
}};

}  // namespace

std::string_view to_string(Regime regime) noexcept {
  for (const auto& [value, name] : kRegimeNames) {
    if (value == regime) return name;
  }
  return "unknown";
}

Regime parse_regime(std::string_view text) {
  for (const auto& [value, name] : kRegimeNames) {
    if (name == text) return value;
  }
  throw Error(ErrorCode::InvalidConfig,
              "unknown regime '" + std::string(text) + "'");
}

std::string_view to_string(OptimizerStatus status) noexcept {
  switch (status) {
    case OptimizerStatus::Converged:
      return "converged";
    case OptimizerStatus::BoundaryOptimum:
      return "boundary_optimum";
    case OptimizerStatus::NoConvergence:
      return "no_convergence";
  }
  return "unknown";
}

Regime classify_regime(const ProbeState& state, double delta_bar,
                       const ClassificationTolerances& tol) {
  const double nbar = mean_photon_number(state);
  const bool resonant = std::abs(delta_bar) < tol.tol_delta;
  if (state.r < tol.tol_r) {
    return resonant ? Regime::CoherentRes : Regime::CoherentOffRes;
  }
  if (state.R * state.R < tol.tol_R * (1.0 + nbar)) {
    return resonant ? Regime::SqueezedVacuumRes : Regime::SqueezedVacuumOffRes;
  }
  return resonant ? Regime::SqueezedCoherentRes : Regime::SqueezedCoherentOffRes;
}

Regime classify_regime(const OptimizationResult& result,
                       const ClassificationTolerances& tol) {
  return classify_regime(result.state, result.delta_bar, tol);
}

namespace {

// Search coordinates. Displacement enters through u = ln(1 + R^2) so that the
// photon-number axis spans decades.
struct SearchSpace {
  StateFamily family;
  SearchBounds bounds;

  std::size_t dim() const { return family == StateFamily::Gaussian ? 5 : 3; }
  double u_max() const { return std::log1p(bounds.nbar_max); }

  SearchSeed decode(std::span<const double> x) const {
    SearchSeed out;
    out.state.R = std::sqrt(std::expm1(std::max(x[0], 0.0)));
    out.state.theta = wrap_phase(x[1]);
    if (family == StateFamily::Gaussian) {
      out.state.r = x[2];
      out.state.psi = wrap_phase(x[3]);
      out.delta_bar = x[4];
    } else {
      out.delta_bar = x[2];
    }
    return out;
  }

  std::vector<double> encode(const SearchSeed& seed) const {
    const double u = std::clamp(std::log1p(seed.state.R * seed.state.R), 0.0,
                                u_max());
    const double delta =
        std::clamp(std::abs(seed.delta_bar), 0.0, bounds.delta_max);
    // Reflecting delta_bar flips both phases.
    const double sign = seed.delta_bar < 0.0 ? -1.0 : 1.0;
    if (family == StateFamily::Gaussian) {
      return {u, sign * seed.state.theta,
              std::clamp(seed.state.r, 0.0, bounds.r_max),
              sign * seed.state.psi, delta};
    }
    return {u, sign * seed.state.theta, delta};
  }

  SimplexOptions simplex_options(const OptimizerConfig& config) const {
    SimplexOptions opt;
    constexpr double pi = std::numbers::pi;
    if (family == StateFamily::Gaussian) {
      opt.lower = {0.0, -pi, 0.0, -pi, 0.0};
      opt.upper = {u_max(), pi, bounds.r_max, pi, bounds.delta_max};
      opt.periodic = {false, true, false, true, false};
      opt.initial_step = {0.5, 0.5, 0.3, 0.5, 0.5};
    } else {
      opt.lower = {0.0, -pi, 0.0};
      opt.upper = {u_max(), pi, bounds.delta_max};
      opt.periodic = {false, true, false};
      opt.initial_step = {0.5, 0.5, 0.5};
    }
    opt.diameter_tol = config.diameter_tol;
    opt.max_iterations = config.iterations_per_dim * static_cast<int>(dim());
    return opt;
  }
};

double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0;
  double scale = 1.0 / base;
  while (index > 0) {
    result += scale * (index % base);
    index /= base;
    scale /= base;
  }
  return result;
}

std::vector<std::vector<double>> start_points(const SearchSpace& space,
                                              const Medium& medium,
                                              const OptimizerConfig& config) {
  constexpr double pi = std::numbers::pi;
  const double off_resonant = 1.0 / std::sqrt(3.0);
  const double coherent_R = std::sqrt(medium.n_sat);

  std::vector<SearchSeed> seeds;
  if (space.family == StateFamily::Gaussian) {
    seeds.push_back({{.R = 0.0, .theta = 0.0, .r = 0.5, .psi = 0.0}, 0.0});
    seeds.push_back(
        {{.R = 0.0, .theta = 0.0, .r = 0.5, .psi = pi / 4.0}, off_resonant});
    seeds.push_back(
        {{.R = coherent_R, .theta = 0.0, .r = 0.0, .psi = 0.0}, off_resonant});
  } else {
    seeds.push_back({{.R = coherent_R, .theta = pi / 2.0}, 0.0});
    seeds.push_back({{.R = coherent_R, .theta = 0.0}, off_resonant});
  }
  seeds.insert(seeds.end(), config.extra_seeds.begin(), config.extra_seeds.end());

  std::vector<std::vector<double>> points;
  points.reserve(seeds.size() + static_cast<std::size_t>(config.quasi_random_starts));
  for (const auto& seed : seeds) points.push_back(space.encode(seed));

  const SimplexOptions box = space.simplex_options(config);
  constexpr std::array<unsigned, 5> bases = {2, 3, 5, 7, 11};
  for (int k = 0; k < config.quasi_random_starts; ++k) {
    std::vector<double> x(space.dim());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double h = radical_inverse(static_cast<unsigned>(k + 1), bases[i]);
      x[i] = box.lower[i] + h * (box.upper[i] - box.lower[i]);
    }
    points.push_back(std::move(x));
  }
  return points;
}

}  // namespace

OptimizationResult optimize(const Medium& medium, Target target,
                            StateFamily family, const OptimizerConfig& config) {
  validate_medium(medium);
  const SearchBounds& b = config.bounds;
  if (!(b.nbar_max > 0.0) || !(b.r_max > 0.0) || !(b.delta_max > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "search bounds must be positive");
  }

  const SearchSpace space{family, b};
  const SimplexOptions options = space.simplex_options(config);
  const auto starts = start_points(space, medium, config);

  const Objective objective = [&](std::span<const double> x) {
    const SearchSeed p = space.decode(x);
    return -detail::fisher_unchecked(p.state, medium, p.delta_bar, target).value;
  };

  std::vector<SimplexResult> runs(starts.size());
  detail::parallel_for(starts.size(), config.threads, [&](std::size_t i) {
    runs[i] = minimize_simplex(objective, starts[i], options);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].value < runs[best].value) best = i;
  }

  OptimizationResult result;
  result.family = family;
  result.target = target;
  result.medium = medium;
  result.value = -runs[best].value;
  const SearchSeed optimum = space.decode(runs[best].x);
  result.state = optimum.state;
  result.delta_bar = optimum.delta_bar;
  result.nbar = mean_photon_number(result.state);
  result.regime = classify_regime(result, config.tolerances);
  result.starts_total = static_cast<int>(runs.size());
  const double threshold =
      result.value - config.agreement_rel_tol * std::abs(result.value);
  result.starts_agreeing = static_cast<int>(std::count_if(
      runs.begin(), runs.end(),
      [&](const SimplexResult& r) { return -r.value >= threshold; }));

  const std::vector<double>& x = runs[best].x;
  const double margin = 1.0 - config.boundary_fraction;
  result.boundary_flag = x[0] >= margin * space.u_max() ||
                         x.back() >= margin * b.delta_max ||
                         (family == StateFamily::Gaussian &&
                          x[2] >= margin * b.r_max);

  if (result.boundary_flag) {
    result.status = OptimizerStatus::BoundaryOptimum;
    std::ostringstream msg;
    msg << "optimum at the search boundary (nbar=" << result.nbar
        << ", r=" << result.state.r << ", delta_bar=" << result.delta_bar
        << ")";
    throw OptimizationError(ErrorCode::BoundaryOptimum, msg.str(), result);
  }
  if (result.starts_agreeing < config.min_agreeing_starts) {
    result.status = OptimizerStatus::NoConvergence;
    std::ostringstream msg;
    msg << "only " << result.starts_agreeing << " of " << result.starts_total
        << " starts reached the best value";
    throw OptimizationError(ErrorCode::NoConvergence, msg.str(), result);
  }
  return result;
}

AdvantageResult quantum_advantage(const Medium& medium, Target target,
                                  const OptimizerConfig& config) {
  AdvantageResult out;
  std::optional<Error> failure;

  auto run = [&](StateFamily family, const OptimizerConfig& cfg) {
    try {
      return optimize(medium, target, family, cfg);
    } catch (const OptimizationError& e) {
      if (!failure || e.code() == ErrorCode::BoundaryOptimum) {
        failure.emplace(e.code(), std::string(to_string(family)) +
                                      " search: " + e.what());
      }
      return e.payload();
    }
  };

  out.coh_result = run(StateFamily::CoherentOnly, config);

  OptimizerConfig seeded = config;
  seeded.extra_seeds.push_back({out.coh_result.state, out.coh_result.delta_bar});
  out.sq_result = run(StateFamily::Gaussian, seeded);

  // The coherent optimum is itself a Gaussian-family point.
  if (out.sq_result.value < out.coh_result.value) {
    OptimizationResult lifted = out.coh_result;
    lifted.family = StateFamily::Gaussian;
    out.sq_result = lifted;
  }

  out.i_sq = out.sq_result.value;
  out.i_coh = out.coh_result.value;
  out.advantage = out.i_coh > 0.0 ? out.i_sq / out.i_coh : 1.0;

  if (failure) {
    throw AdvantageError(failure->code(), failure->what(), out);
  }
  return out;
}

}  // namespace nuqs
