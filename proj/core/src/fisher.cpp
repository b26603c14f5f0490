#include "nuqs/fisher.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/expm1.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "nuqs/error.hpp"

namespace nuqs {

std::string_view to_string(Target target) noexcept {
  switch (target) {
    case Target::Detuning:
      return "detuning";
    case Target::OpticalDepth:
      return "od";
  }
  return "unknown";
}

Target parse_target(std::string_view text) {
  if (text == "detuning" || text == "delta") return Target::Detuning;
  if (text == "od" || text == "optical_depth" || text == "T") {
    return Target::OpticalDepth;
  }
  throw Error(ErrorCode::InvalidConfig,
              "target must be 'detuning' or 'od', got '" + std::string(text) +
                  "'");
}

FisherBreakdown gaussian_fisher(double mu, double v, double dmu, double dv) {
  if (!(v > 0.0)) {
    throw Error(ErrorCode::NonPositiveVariance, "variance must be > 0");
  }
  if (!std::isfinite(mu) || !std::isfinite(v) || !std::isfinite(dmu) ||
      !std::isfinite(dv)) {
    throw Error(ErrorCode::NonFiniteField,
                "gaussian_fisher arguments must be finite");
  }
  FisherBreakdown out;
  out.mean_term = dmu * dmu / v;
  out.var_term = dv * dv / (2.0 * v * v);
  out.value = out.mean_term + out.var_term;
  return out;
}

namespace {

struct ResponseSlope {
  double dphi = 0.0;
  double dxi = 0.0;
};

// gamma_bar is target-independent because nbar is held fixed.
ResponseSlope response_slope(const Medium& medium, double delta_bar,
                             double nbar, Target target) {
  const double gamma_sq = 1.0 + nbar / medium.n_sat;
  const double denom = delta_bar * delta_bar + gamma_sq;
  if (target == Target::OpticalDepth) {
    return {.dphi = 0.5 * delta_bar / denom, .dxi = 0.5 / denom};
  }
  const double scale = 0.5 * medium.T / (denom * denom);
  return {.dphi = scale * (gamma_sq - delta_bar * delta_bar),
          .dxi = scale * (-2.0 * delta_bar)};
}

QuadratureStats stats_at_target(const ProbeState& state, const Medium& medium,
                                double delta_bar, double nbar, Target target,
                                double y) {
  const Response response =
      target == Target::Detuning
          ? detail::response_unchecked(medium.T, medium.n_sat, y, nbar)
          : detail::response_unchecked(y, medium.n_sat, delta_bar, nbar);
  return detail::output_stats_unchecked(state, response);
}

ModelDerivatives analytic_derivatives(const ProbeState& state,
                                      const Medium& medium, double delta_bar,
                                      Target target, double nbar,
                                      const Response& response) noexcept {
  const ResponseSlope slope = response_slope(medium, delta_bar, nbar, target);
  const double phi = response.phi;
  const double amplitude = std::exp(-response.xi);
  const double transmission = amplitude * amplitude;

  ModelDerivatives out;
  out.dmu = 2.0 * state.R * amplitude *
            (-std::sin(phi - state.theta) * slope.dphi -
             std::cos(phi - state.theta) * slope.dxi);
  out.dv = transmission * (input_variance_slope(state, phi) * slope.dphi -
                           2.0 * input_excess_variance(state, phi) * slope.dxi);
  return out;
}

// The model again in quad precision, for the finite-difference path.
// Differencing in double loses the slope when it is small next to mu (tiny
// T or heavy saturation); the variance is differenced through v - 1, which
// has the same derivative but keeps the digits that "1 +" would absorb.
using Extended = boost::multiprecision::cpp_bin_float_quad;

struct ExtendedStats {
  Extended mu = 0;
  Extended excess = 0;
};

ExtendedStats extended_stats(const ProbeState& s, const Medium& medium,
                             double delta_bar, Target target, Extended y) {
  const Extended T = target == Target::OpticalDepth ? y : Extended(medium.T);
  const Extended delta = target == Target::Detuning ? y : Extended(delta_bar);
  const Extended sr = sinh(Extended(s.r));
  const Extended nbar = Extended(s.R) * s.R + sr * sr;
  const Extended gamma_sq = 1 + nbar / medium.n_sat;
  const Extended denom = delta * delta + gamma_sq;
  const Extended phi = T / 2 * delta / denom;
  const Extended xi = T / 2 / denom;
  const Extended amplitude = exp(-xi);
  const Extended c = cos(phi - s.psi);
  const Extended sn = sin(phi - s.psi);
  return {
      .mu = 2 * Extended(s.R) * cos(phi - s.theta) * amplitude,
      .excess = (boost::math::expm1(Extended(-2 * s.r)) * c * c +
                 boost::math::expm1(Extended(2 * s.r)) * sn * sn) *
                amplitude * amplitude,
  };
}

template <typename F>
Extended extended_richardson(F&& f, Extended x) {
  const Extended h = (abs(x) > 1 ? Extended(abs(x)) : Extended(1)) *
                     cbrt(Extended(std::numeric_limits<Extended>::epsilon()));
  auto central = [&](Extended step) {
    return (f(x + step) - f(x - step)) / (2 * step);
  };
  return (4 * central(h / 2) - central(h)) / 3;
}

}  // namespace

double richardson_derivative(const std::function<double(double)>& f, double x) {
  const double h =
      std::max(std::abs(x), 1.0) * std::cbrt(std::numeric_limits<double>::epsilon());
  auto central = [&](double step) {
    return (f(x + step) - f(x - step)) / (2.0 * step);
  };
  const double coarse = central(h);
  const double fine = central(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

ModelDerivatives model_derivatives(const ProbeState& state, const Medium& medium,
                                   double delta_bar, Target target,
                                   DerivativeMode mode) {
  const ModelPoint point = evaluate_model(state, medium, delta_bar);
  const ProbeState checked = validate_state(state);

  if (mode == DerivativeMode::FiniteDifference) {
    const Extended y0 = target == Target::Detuning ? delta_bar : medium.T;
    auto stats = [&](Extended y) {
      return extended_stats(checked, medium, delta_bar, target, y);
    };
    return {
        .dmu = static_cast<double>(extended_richardson(
            [&](Extended y) { return stats(y).mu; }, y0)),
        .dv = static_cast<double>(extended_richardson(
            [&](Extended y) { return stats(y).excess; }, y0)),
    };
  }

  return analytic_derivatives(checked, medium, delta_bar, target, point.nbar,
                              point.response);
}

FisherBreakdown fisher_information(const ProbeState& state, const Medium& medium,
                                   double delta_bar, Target target) {
  const ModelPoint point = evaluate_model(state, medium, delta_bar);
  const ModelDerivatives d = model_derivatives(state, medium, delta_bar, target);
  return gaussian_fisher(point.output.mu, point.output.v, d.dmu, d.dv);
}

namespace detail {

FisherBreakdown fisher_unchecked(const ProbeState& state, const Medium& medium,
                                 double delta_bar, Target target) noexcept {
  const double nbar = mean_photon_number(state);
  const Response response =
      response_unchecked(medium.T, medium.n_sat, delta_bar, nbar);
  const QuadratureStats out = output_stats_unchecked(state, response);
  const ModelDerivatives d =
      analytic_derivatives(state, medium, delta_bar, target, nbar, response);
  FisherBreakdown fi;
  fi.mean_term = d.dmu * d.dmu / out.v;
  fi.var_term = d.dv * d.dv / (2.0 * out.v * out.v);
  fi.value = fi.mean_term + fi.var_term;
  return fi;
}

ModelDerivatives derivatives_unchecked(const ProbeState& state,
                                       const Medium& medium, double delta_bar,
                                       Target target) noexcept {
  const double nbar = mean_photon_number(state);
  return analytic_derivatives(
      state, medium, delta_bar, target, nbar,
      response_unchecked(medium.T, medium.n_sat, delta_bar, nbar));
}

}  // namespace detail

double numeric_fi_oracle(const OutcomeModel& model, double y0,
                         const OracleGrid& grid) {
  // Richardson-refined central difference in Y. Its truncation error is
  // O(h^4), so the balanced step is eps^(1/5) rather than eps^(1/3).
  const double h = std::max(std::abs(y0), 1.0) *
                   std::pow(std::numeric_limits<double>::epsilon(), 0.2);
  const std::array<QuadratureStats, 4> stencil = {
      model(y0 + h), model(y0 - h), model(y0 + 0.5 * h), model(y0 - 0.5 * h)};
  const QuadratureStats centre = model(y0);
  for (const auto& s : stencil) {
    if (!(s.v > 0.0)) {
      throw Error(ErrorCode::NonPositiveVariance, "variance must be > 0");
    }
  }
  if (!(centre.v > 0.0)) {
    throw Error(ErrorCode::NonPositiveVariance, "variance must be > 0");
  }

  // ln P(m|a) - ln P(m|b), arranged so the O((m-mu)^2/v) parts cancel
  // analytically rather than in floating point.
  auto log_ratio = [](double m, const QuadratureStats& a,
                      const QuadratureStats& b) {
    const double da = m - a.mu;
    const double db = m - b.mu;
    const double quad =
        ((b.mu - a.mu) * (da + db) * b.v - db * db * (a.v - b.v)) / (a.v * b.v);
    return -0.5 * quad - 0.5 * std::log1p((a.v - b.v) / b.v);
  };
  auto integrand = [&](double m) {
    const double coarse = log_ratio(m, stencil[0], stencil[1]) / (2.0 * h);
    const double fine = log_ratio(m, stencil[2], stencil[3]) / h;
    const double score = (4.0 * fine - coarse) / 3.0;
    const double d = m - centre.mu;
    const double density = std::exp(-0.5 * d * d / centre.v) /
                           std::sqrt(2.0 * std::numbers::pi * centre.v);
    return density * score * score;
  };

  const double sigma = std::sqrt(centre.v);
  const double lo = centre.mu - grid.half_width_sigmas * sigma;
  const double hi = centre.mu + grid.half_width_sigmas * sigma;

  using Rule = boost::math::quadrature::gauss<double, 20>;
  auto composite = [&](int panels) {
    const double width = (hi - lo) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double a = lo + k * width;
      sum += Rule::integrate(integrand, a, k + 1 == panels ? hi : a + width);
    }
    return sum;
  };

  int panels = grid.initial_panels;
  double previous = composite(panels);
  for (int level = 0; level < grid.max_refinements; ++level) {
    panels *= 2;
    const double current = composite(panels);
    const double change = std::abs(current - previous);
    if (change <= grid.rel_tol * std::abs(current) ||
        change <= std::numeric_limits<double>::min()) {
      return current;
    }
    previous = current;
  }
  throw Error(ErrorCode::IntegrationDidNotConverge,
              "successive quadrature refinements disagree");
}

double numeric_fi_oracle(const ProbeState& state, const Medium& medium,
                         double delta_bar, Target target,
                         const OracleGrid& grid) {
  const ProbeState checked = validate_state(state);
  validate_medium(medium);
  const double nbar = mean_photon_number(checked);
  const double y0 = target == Target::Detuning ? delta_bar : medium.T;
  return numeric_fi_oracle(
      [&](double y) {
        return stats_at_target(checked, medium, delta_bar, nbar, target, y);
      },
      y0, grid);
}

}  // namespace nuqs
