#include "nuqs/medium.hpp"

#include <cmath>

#include "nuqs/error.hpp"

namespace nuqs {

Medium validate_medium(const Medium& medium) {
  if (!std::isfinite(medium.T) || medium.T <= 0.0) {
    throw Error(ErrorCode::InvalidMedium, "T must be finite and > 0");
  }
  if (!std::isfinite(medium.n_sat) || medium.n_sat <= 0.0) {
    throw Error(ErrorCode::InvalidMedium, "n_sat must be finite and > 0");
  }
  return medium;
}

double power_broadened_linewidth(const Medium& medium, double nbar) {
  validate_medium(medium);
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw Error(ErrorCode::NegativePhotonNumber,
                "mean photon number must be finite and >= 0");
  }
  return std::sqrt(1.0 + nbar / medium.n_sat);
}

Response complex_response(const Medium& medium, double delta_bar,
                          double nbar) {
  power_broadened_linewidth(medium, nbar);
  if (!std::isfinite(delta_bar)) {
    throw Error(ErrorCode::NonFiniteField, "delta_bar must be finite");
  }
  return detail::response_unchecked(medium.T, medium.n_sat, delta_bar, nbar);
}

QuadratureStats output_quadrature_stats(const ProbeState& state,
                                        const Medium& medium,
                                        double delta_bar) {
  return evaluate_model(state, medium, delta_bar).output;
}

ModelPoint evaluate_model(const ProbeState& state, const Medium& medium,
                          double delta_bar) {
  const ProbeState checked = validate_state(state);
  ModelPoint point;
  point.nbar = mean_photon_number(checked);
  point.response = complex_response(medium, delta_bar, point.nbar);
  point.input = input_quadrature_stats(checked, point.response.phi);
  point.output = detail::output_stats_unchecked(checked, point.response);
  return point;
}

namespace detail {

Response response_unchecked(double T, double n_sat, double delta_bar,
                            double nbar) noexcept {
  const double gamma_sq = 1.0 + nbar / n_sat;
  const double denom = delta_bar * delta_bar + gamma_sq;
  return {
      .phi = 0.5 * T * delta_bar / denom,
      .xi = 0.5 * T / denom,
      .gamma_bar = std::sqrt(gamma_sq),
  };
}

QuadratureStats output_stats_unchecked(const ProbeState& state,
                                       const Response& response) noexcept {
  // Beam-splitter form: v_out - 1 = (v_in - 1) exp(-2 xi).
  const double amplitude = std::exp(-response.xi);
  return {
      .mu = 2.0 * state.R * std::cos(response.phi - state.theta) * amplitude,
      .v = 1.0 + input_excess_variance(state, response.phi) * amplitude *
                     amplitude,
  };
}

}  // namespace detail

}  // namespace nuqs
