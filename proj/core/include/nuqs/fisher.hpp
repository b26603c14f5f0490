#pragma once

#include <functional>
#include <string_view>

#include "nuqs/medium.hpp"
#include "nuqs/probe_state.hpp"

namespace nuqs {

/// Parameter being estimated. Detuning information is per gamma_0^2;
/// optical-depth information is dimensionless.
enum class Target { Detuning, OpticalDepth };

std::string_view to_string(Target target) noexcept;
/// Accepts "detuning" and "od" (also "optical_depth"). Throws InvalidConfig.
Target parse_target(std::string_view text);

struct FisherBreakdown {
  double value = 0.0;
  double mean_term = 0.0;  ///< (dmu/dY)^2 / v
  double var_term = 0.0;   ///< (dv/dY)^2 / (2 v^2)
};

struct ModelDerivatives {
  double dmu = 0.0;
  double dv = 0.0;
};

enum class DerivativeMode { Analytic, FiniteDifference };

/// Fisher information of a Gaussian outcome with mean mu(Y), variance v(Y).
/// Throws Error{NonPositiveVariance} when v <= 0.
FisherBreakdown gaussian_fisher(double mu, double v, double dmu, double dv);

/// d(mu, v)/dY of the transmitted X statistics at fixed probe parameters (and
/// hence fixed nbar and gamma_bar).
ModelDerivatives model_derivatives(const ProbeState& state, const Medium& medium,
                                   double delta_bar, Target target,
                                   DerivativeMode mode = DerivativeMode::Analytic);

/// Closed-form Fisher information of one X measurement on the output.
FisherBreakdown fisher_information(const ProbeState& state, const Medium& medium,
                                   double delta_bar, Target target);

/// Central difference with one Richardson step, h = max(|x|, 1) eps^{1/3}.
double richardson_derivative(const std::function<double(double)>& f, double x);

/// Integration controls for the numeric oracle.
struct OracleGrid {
  double half_width_sigmas = 8.0;  ///< integrate over mu +- this many sigma
  int initial_panels = 8;
  int max_refinements = 12;
  double rel_tol = 1e-11;
};

/// Outcome model for the oracle: the Gaussian (mu, v) as a function of Y.
using OutcomeModel = std::function<QuadratureStats(double)>;

/// Integrates P(m|Y) (d_Y ln P(m|Y))^2 over m, with the score obtained by a
/// Richardson-refined central difference of ln P in Y. Independent of the
/// closed-form Gaussian expression. Throws Error{IntegrationDidNotConverge}.
double numeric_fi_oracle(const OutcomeModel& model, double y0,
                         const OracleGrid& grid = {});

/// Oracle for the full transmission model; the probe is held fixed while the
/// target parameter varies.
double numeric_fi_oracle(const ProbeState& state, const Medium& medium,
                         double delta_bar, Target target,
                         const OracleGrid& grid = {});

namespace detail {

// No validation; for inner loops over already-valid inputs.
FisherBreakdown fisher_unchecked(const ProbeState& state, const Medium& medium,
                                 double delta_bar, Target target) noexcept;
ModelDerivatives derivatives_unchecked(const ProbeState& state,
                                       const Medium& medium, double delta_bar,
                                       Target target) noexcept;

}  // namespace detail

}  // namespace nuqs
