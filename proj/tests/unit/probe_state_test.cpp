#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "nuqs/error.hpp"
#include "nuqs/probe_state.hpp"

namespace nuqs {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(MeanPhotonNumber, ClosedForms) {
  EXPECT_EQ(mean_photon_number({}), 0.0);
  EXPECT_DOUBLE_EQ(mean_photon_number({.R = 2.0}), 4.0);
  EXPECT_NEAR(mean_photon_number({.r = 1.0}), 1.3810978, 1e-7);
}

TEST(MeanPhotonNumber, ZeroOnlyForVacuum) {
  EXPECT_GT(mean_photon_number({.R = 1e-8}), 0.0);
  EXPECT_GT(mean_photon_number({.r = 1e-8}), 0.0);
}

TEST(InputStats, Examples) {
  QuadratureStats s = input_quadrature_stats({.R = 1.0}, 0.0);
  EXPECT_DOUBLE_EQ(s.mu, 2.0);
  EXPECT_EQ(s.v, 1.0);

  s = input_quadrature_stats({.r = 1.0}, kPi / 2.0);
  EXPECT_NEAR(s.mu, 0.0, 1e-15);
  EXPECT_NEAR(s.v, 7.389056, 1e-6);

  s = input_quadrature_stats({.r = 1.0}, 0.0);
  EXPECT_EQ(s.mu, 0.0);
  EXPECT_NEAR(s.v, 0.1353353, 1e-7);
}

class RandomStates : public ::testing::Test {
 protected:
  std::mt19937_64 rng{99};
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  ProbeState draw() {
    return {.R = 5.0 * unit(rng),
            .theta = kPi * (2.0 * unit(rng) - 1.0),
            .r = 2.0 * unit(rng),
            .psi = kPi * (2.0 * unit(rng) - 1.0)};
  }
  double angle() { return 4.0 * kPi * (unit(rng) - 0.5); }
};

// Along the squeeze axes the product is exactly 1; elsewhere it exceeds 1.
TEST_F(RandomStates, UncertaintyProduct) {
  for (int k = 0; k < 1000; ++k) {
    const ProbeState s = draw();
    const double on_axis = input_quadrature_stats(s, s.psi).v *
                           input_quadrature_stats(s, s.psi + kPi / 2.0).v;
    EXPECT_NEAR(on_axis, 1.0, 1e-12 * on_axis);
    const double a = angle();
    const double product = input_quadrature_stats(s, a).v *
                           input_quadrature_stats(s, a + kPi / 2.0).v;
    EXPECT_GE(product, 1.0 - 1e-12);
  }
}

TEST_F(RandomStates, VarianceBounds) {
  for (int k = 0; k < 1000; ++k) {
    const ProbeState s = draw();
    const double v = input_quadrature_stats(s, angle()).v;
    EXPECT_GE(v, std::exp(-2.0 * s.r) * (1.0 - 1e-14));
    EXPECT_LE(v, std::exp(2.0 * s.r) * (1.0 + 1e-14));
  }
}

TEST_F(RandomStates, CoherentVarianceIsPhaseIndependent) {
  for (int k = 0; k < 200; ++k) {
    ProbeState s = draw();
    s.r = 0.0;
    EXPECT_EQ(input_quadrature_stats(s, angle()).v, 1.0);
  }
}

TEST_F(RandomStates, Periodicity) {
  for (int k = 0; k < 200; ++k) {
    const ProbeState s = draw();
    const double a = angle();
    const QuadratureStats base = input_quadrature_stats(s, a);
    EXPECT_NEAR(input_quadrature_stats(s, a + 2.0 * kPi).mu, base.mu,
                1e-12 * (1.0 + std::abs(base.mu)));
    EXPECT_NEAR(input_quadrature_stats(s, a + kPi).v, base.v, 1e-12 * base.v);
  }
}

TEST_F(RandomStates, ExcessAndSlopeAgreeWithVariance) {
  for (int k = 0; k < 200; ++k) {
    const ProbeState s = draw();
    const double a = angle();
    EXPECT_NEAR(1.0 + input_excess_variance(s, a),
                input_quadrature_stats(s, a).v, 1e-12 * input_quadrature_stats(s, a).v);
    const double h = 1e-5;
    const double fd = (input_quadrature_stats(s, a + h).v -
                       input_quadrature_stats(s, a - h).v) /
                      (2.0 * h);
    EXPECT_NEAR(input_variance_slope(s, a), fd, 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST(WrapPhase, HalfOpenInterval) {
  EXPECT_EQ(wrap_phase(kPi), -kPi);
  EXPECT_EQ(wrap_phase(-kPi), -kPi);
  EXPECT_NEAR(wrap_phase(3.0 * kPi), -kPi, 1e-12);
  EXPECT_NEAR(wrap_phase(0.5), 0.5, 0.0);
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = wrap_phase(a);
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
    EXPECT_NEAR(std::remainder(a - w, 2.0 * kPi), 0.0, 1e-12);
  }
}

TEST(ValidateState, Examples) {
  const ProbeState wrapped = validate_state({.R = 1.0, .theta = 3.0 * kPi});
  EXPECT_EQ(wrapped.R, 1.0);
  EXPECT_NEAR(wrapped.theta, -kPi, 1e-12);

  const ProbeState plain{.R = 1.0};
  EXPECT_EQ(validate_state(plain), plain);
}

TEST(ValidateState, Rejections) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  auto code_of = [](const ProbeState& s) {
    try {
      validate_state(s);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code_of({.R = nan}), ErrorCode::NonFiniteField);
  EXPECT_EQ(code_of({.psi = inf}), ErrorCode::NonFiniteField);
  EXPECT_EQ(code_of({.r = 800.0}), ErrorCode::NonFiniteField);
  EXPECT_EQ(code_of({.R = -1.0}), ErrorCode::NegativeMagnitude);
  EXPECT_EQ(code_of({.r = -0.5}), ErrorCode::NegativeMagnitude);
}

TEST(ValidateState, AbsorbSignsIntoPhases) {
  const ProbeState in{.R = -2.0, .theta = 0.3, .r = -0.7, .psi = 0.1};
  const ProbeState out = validate_state(in, SignPolicy::Absorb);
  EXPECT_EQ(out.R, 2.0);
  EXPECT_EQ(out.r, 0.7);
  for (double a : {0.0, 0.4, 1.3, -2.2}) {
    const QuadratureStats x = input_quadrature_stats(out, a);
    // The same physical state: a -> -a and zeta -> -zeta.
    EXPECT_NEAR(x.mu, -2.0 * 2.0 * std::cos(a - 0.3), 1e-12);
    const double c = std::cos(a - 0.1), s = std::sin(a - 0.1);
    EXPECT_NEAR(x.v, std::exp(1.4) * c * c + std::exp(-1.4) * s * s, 1e-12);
  }
}

}  // namespace
}  // namespace nuqs
