#pragma once

#include "nuqs/probe_state.hpp"

// Saturable resonant absorber in a refractive-index model. All frequencies are
// in units of the unbroadened linewidth gamma_0, so detunings are delta_bar and
// linewidths gamma_bar.

namespace nuqs {

struct Medium {
  double T = 1.0;      ///< on-resonance optical depth, > 0
  double n_sat = 1.0;  ///< saturation photon number, > 0

  friend bool operator==(const Medium&, const Medium&) = default;
};

/// Phase shift, amplitude attenuation exponent and broadened linewidth at a
/// working point. Power transmission is exp(-2 xi).
struct Response {
  double phi = 0.0;
  double xi = 0.0;
  double gamma_bar = 1.0;
};

/// Everything the output measurement depends on, for reporting.
struct ModelPoint {
  double nbar = 0.0;
  Response response;
  QuadratureStats input;   ///< X_phi on the input state
  QuadratureStats output;  ///< X on the transmitted field
};

/// Throws Error{InvalidMedium} unless T and n_sat are finite and positive.
Medium validate_medium(const Medium& medium);

/// gamma_bar = sqrt(1 + nbar / n_sat). Throws Error{NegativePhotonNumber}.
double power_broadened_linewidth(const Medium& medium, double nbar);

/// phi + i xi = (T/2) (delta_bar + i) / (delta_bar^2 + gamma_bar^2).
Response complex_response(const Medium& medium, double delta_bar, double nbar);

/// Transmitted X statistics: the input quadrature is rotated by phi, scaled by
/// exp(-xi), and the lost fraction is refilled with reservoir vacuum.
/// Saturation is set by the mean photon number of the input state.
QuadratureStats output_quadrature_stats(const ProbeState& state,
                                        const Medium& medium, double delta_bar);

ModelPoint evaluate_model(const ProbeState& state, const Medium& medium,
                          double delta_bar);

namespace detail {

// Unvalidated forms; T may take any real value (the response is linear in T),
// which finite-difference stencils around small T rely on.
Response response_unchecked(double T, double n_sat, double delta_bar,
                            double nbar) noexcept;
QuadratureStats output_stats_unchecked(const ProbeState& state,
                                       const Response& response) noexcept;

}  // namespace detail

}  // namespace nuqs
