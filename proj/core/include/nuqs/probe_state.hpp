#pragma once

// Single-mode Gaussian probe states D(alpha) S(zeta)|0>, alpha = R e^{i theta},
// zeta = r e^{2 i psi}. Quadratures are normalized so the vacuum variance is 1.

namespace nuqs {

struct ProbeState {
  double R = 0.0;      ///< displacement magnitude, >= 0
  double theta = 0.0;  ///< displacement phase, [-pi, pi)
  double r = 0.0;      ///< squeeze magnitude, >= 0
  double psi = 0.0;    ///< squeeze phase, [-pi, pi)

  friend bool operator==(const ProbeState&, const ProbeState&) = default;
};

/// Mean and variance of a measured quadrature; v > 0.
struct QuadratureStats {
  double mu = 0.0;
  double v = 1.0;

  friend bool operator==(const QuadratureStats&, const QuadratureStats&) = default;
};

enum class SignPolicy {
  Reject,  ///< negative R or r is an error
  Absorb,  ///< fold a negative magnitude into its phase
};

/// Wraps an angle into [-pi, pi).
double wrap_phase(double angle) noexcept;

/// Checks finiteness and sign of the fields and wraps both phases.
/// Throws Error{NonFiniteField} or Error{NegativeMagnitude}.
ProbeState validate_state(const ProbeState& state,
                          SignPolicy policy = SignPolicy::Reject);

/// <a^dagger a> = R^2 + sinh^2 r.
double mean_photon_number(const ProbeState& state) noexcept;

/// Statistics of X_angle = a e^{-i angle} + a^dagger e^{i angle} on the input
/// state: mu = 2R cos(angle - theta),
/// v = e^{-2r} cos^2(angle - psi) + e^{2r} sin^2(angle - psi).
QuadratureStats input_quadrature_stats(const ProbeState& state,
                                       double angle) noexcept;

/// v - 1 for the input quadrature, evaluated without cancellation; exactly 0
/// for r = 0.
double input_excess_variance(const ProbeState& state, double angle) noexcept;

/// d v / d angle for the input quadrature variance.
double input_variance_slope(const ProbeState& state, double angle) noexcept;

}  // namespace nuqs
