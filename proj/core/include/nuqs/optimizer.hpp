#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "nuqs/error.hpp"
#include "nuqs/fisher.hpp"
#include "nuqs/medium.hpp"
#include "nuqs/probe_state.hpp"

namespace nuqs {

enum class StateFamily {
  CoherentOnly,  ///< r fixed at 0
  Gaussian,      ///< R, theta, r, psi all free
};

std::string_view to_string(StateFamily family) noexcept;
StateFamily parse_family(std::string_view text);

enum class Regime {
  SqueezedVacuumOffRes,
  SqueezedVacuumRes,
  SqueezedCoherentOffRes,
  SqueezedCoherentRes,
  CoherentOffRes,
  CoherentRes,
};

std::string_view to_string(Regime regime) noexcept;
Regime parse_regime(std::string_view text);

struct ClassificationTolerances {
  double tol_R = 1e-6;      ///< R^2 < tol_R (1 + nbar) counts as no displacement
  double tol_r = 1e-4;      ///< r < tol_r counts as unsqueezed
  double tol_delta = 1e-4;  ///< |delta_bar| < tol_delta counts as resonant
};

struct SearchBounds {
  double nbar_max = 1e6;
  double r_max = 6.0;
  double delta_max = 50.0;
};

/// A probe/detuning pair used to seed the multi-start search.
struct SearchSeed {
  ProbeState state;
  double delta_bar = 0.0;
};

struct OptimizerConfig {
  SearchBounds bounds;
  ClassificationTolerances tolerances;
  int quasi_random_starts = 32;
  double diameter_tol = 1e-10;
  int iterations_per_dim = 400;
  int min_agreeing_starts = 3;
  double agreement_rel_tol = 1e-6;
  double boundary_fraction = 0.01;
  /// Worker threads for independent starts; <= 1 runs inline.
  int threads = 1;
  /// Additional warm starts (e.g. the other family's optimum or a
  /// neighbouring grid cell).
  std::vector<SearchSeed> extra_seeds;
};

enum class OptimizerStatus { Converged, BoundaryOptimum, NoConvergence };

std::string_view to_string(OptimizerStatus status) noexcept;

struct OptimizationResult {
  StateFamily family = StateFamily::Gaussian;
  Target target = Target::Detuning;
  Medium medium;
  double value = 0.0;
  ProbeState state;
  double delta_bar = 0.0;
  double nbar = 0.0;
  Regime regime = Regime::CoherentRes;
  bool boundary_flag = false;
  int starts_agreeing = 0;
  int starts_total = 0;
  OptimizerStatus status = OptimizerStatus::Converged;
};

struct AdvantageResult {
  double i_sq = 0.0;
  double i_coh = 0.0;
  double advantage = 1.0;
  OptimizationResult sq_result;
  OptimizationResult coh_result;
};

using OptimizationError = ErrorWith<OptimizationResult>;
using AdvantageError = ErrorWith<AdvantageResult>;

/// Multi-start bounded simplex maximisation of the Fisher information over the
/// chosen state family and the working detuning (searched on [0, delta_max];
/// the reflected point -delta_bar is equally optimal).
///
/// Throws OptimizationError carrying the best point found when the optimum
/// sits within boundary_fraction of an upper search bound (BoundaryOptimum),
/// or when fewer than min_agreeing_starts starts reach the best value
/// (NoConvergence).
OptimizationResult optimize(const Medium& medium, Target target,
                            StateFamily family,
                            const OptimizerConfig& config = {});

Regime classify_regime(const OptimizationResult& result,
                       const ClassificationTolerances& tol = {});
Regime classify_regime(const ProbeState& state, double delta_bar,
                       const ClassificationTolerances& tol = {});

/// Number-optimised advantage I_sq / I_coh. The Gaussian search is seeded
/// with the coherent optimum, so the ratio is >= 1 up to optimiser noise.
/// Throws AdvantageError if either search fails; the payload holds both
/// partial results.
AdvantageResult quantum_advantage(const Medium& medium, Target target,
                                  const OptimizerConfig& config = {});

}  // namespace nuqs
