#include "nuqs/probe_state.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nuqs/error.hpp"

namespace nuqs {

double wrap_phase(double angle) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, two_pi);
  if (wrapped >= std::numbers::pi) wrapped -= two_pi;
  if (wrapped < -std::numbers::pi) wrapped += two_pi;
  return wrapped;
}

ProbeState validate_state(const ProbeState& state, SignPolicy policy) {
  auto check_finite = [](double value, const char* name) {
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::NonFiniteField,
                  std::string(name) + " must be finite");
    }
  };
  check_finite(state.R, "R");
  check_finite(state.theta, "theta");
  check_finite(state.r, "r");
  check_finite(state.psi, "psi");

  ProbeState out = state;
  if (out.R < 0.0) {
    if (policy == SignPolicy::Reject) {
      throw Error(ErrorCode::NegativeMagnitude, "R must be ≥ 0");
    }
    out.R = -out.R;
    out.theta += std::numbers::pi;
  }
  if (out.r < 0.0) {
    if (policy == SignPolicy::Reject) {
      throw Error(ErrorCode::NegativeMagnitude, "r must be ≥ 0");
    }
    // zeta = r e^{2 i psi}: a sign flip is a quarter turn of psi.
    out.r = -out.r;
    out.psi += std::numbers::pi / 2.0;
  }
  out.theta = wrap_phase(out.theta);
  out.psi = wrap_phase(out.psi);

  if (!std::isfinite(mean_photon_number(out))) {
    throw Error(ErrorCode::NonFiniteField, "mean photon number must be finite");
  }
  return out;
}

double mean_photon_number(const ProbeState& state) noexcept {
  const double s = std::sinh(state.r);
  return state.R * state.R + s * s;
}

QuadratureStats input_quadrature_stats(const ProbeState& state,
                                       double angle) noexcept {
  return {
      .mu = 2.0 * state.R * std::cos(angle - state.theta),
      .v = 1.0 + input_excess_variance(state, angle),
  };
}

double input_excess_variance(const ProbeState& state, double angle) noexcept {
  // e^{-2r} c^2 + e^{2r} s^2 - (c^2 + s^2)
  const double c = std::cos(angle - state.psi);
  const double s = std::sin(angle - state.psi);
  return std::expm1(-2.0 * state.r) * c * c + std::expm1(2.0 * state.r) * s * s;
}

double input_variance_slope(const ProbeState& state, double angle) noexcept {
  return 2.0 * std::sinh(2.0 * state.r) * std::sin(2.0 * (angle - state.psi));
}

}  // namespace nuqs
