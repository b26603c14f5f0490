#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nuqs/error.hpp"
#include "nuqs/fisher.hpp"
#include "nuqs/medium.hpp"

namespace nuqs {
namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

TEST(GaussianFisher, Examples) {
  EXPECT_EQ(gaussian_fisher(3.0, 2.5, 0.0, 0.0).value, 0.0);
  const FisherBreakdown f = gaussian_fisher(-7.0, 1.0, 2.0, 0.0);
  EXPECT_EQ(f.value, 4.0);
  EXPECT_EQ(f.mean_term, 4.0);
  EXPECT_EQ(f.var_term, 0.0);
  for (double v : {1e-3, 0.7, 42.0}) {
    EXPECT_NEAR(gaussian_fisher(0.0, v, 0.0, 2.0 * v).value, 2.0, 1e-15);
  }
}

TEST(GaussianFisher, RejectsNonPositiveVariance) {
  for (double v : {0.0, -1.0}) {
    try {
      gaussian_fisher(0.0, v, 1.0, 1.0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NonPositiveVariance);
    }
  }
}

TEST(ParseTarget, Names) {
  EXPECT_EQ(parse_target("detuning"), Target::Detuning);
  EXPECT_EQ(parse_target("od"), Target::OpticalDepth);
  EXPECT_EQ(parse_target(to_string(Target::OpticalDepth)), Target::OpticalDepth);
  EXPECT_THROW(parse_target("frequency"), Error);
}

TEST(ModelDerivatives, VacuumAndCoherent) {
  const Medium m{.T = 1.3, .n_sat = 0.4};
  for (Target t : {Target::Detuning, Target::OpticalDepth}) {
    for (DerivativeMode mode :
         {DerivativeMode::Analytic, DerivativeMode::FiniteDifference}) {
      const ModelDerivatives d = model_derivatives({}, m, 0.3, t, mode);
      EXPECT_EQ(d.dmu, 0.0);
      EXPECT_EQ(d.dv, 0.0);
    }
    const ModelDerivatives c =
        model_derivatives({.R = 2.0, .theta = 0.4}, m, -0.8, t);
    EXPECT_EQ(c.dv, 0.0);
    EXPECT_NE(c.dmu, 0.0);
  }
}

TEST(ModelDerivatives, AnalyticMatchesFiniteDifference) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const ProbeState s{.R = 5.0 * u(rng),
                       .theta = kPi * (2 * u(rng) - 1),
                       .r = 1.5 * u(rng),
                       .psi = kPi * (2 * u(rng) - 1)};
    const Medium m{.T = std::exp(std::log(0.05) + u(rng) * std::log(400.0)),
                   .n_sat = std::exp(std::log(0.05) + u(rng) * std::log(400.0))};
    const double d = 6 * u(rng) - 3;
    const Target t = k % 2 ? Target::Detuning : Target::OpticalDepth;
    const ModelDerivatives a = model_derivatives(s, m, d, t);
    const ModelDerivatives f =
        model_derivatives(s, m, d, t, DerivativeMode::FiniteDifference);
    EXPECT_LT(rel(a.dmu, f.dmu), 1e-6) << k;
    EXPECT_LT(rel(a.dv, f.dv), 1e-6) << k;
  }
}

TEST(RichardsonDerivative, Polynomial) {
  const auto f = [](double x) { return x * x * x - 2.0 * x; };
  EXPECT_NEAR(richardson_derivative(f, 1.5), 3 * 2.25 - 2.0, 1e-9);
  EXPECT_NEAR(richardson_derivative([](double x) { return std::sin(x); }, 0.0),
              1.0, 1e-10);
}

TEST(FisherInformation, VacuumIsZero) {
  for (Target t : {Target::Detuning, Target::OpticalDepth}) {
    EXPECT_EQ(fisher_information({}, {.T = 2.0, .n_sat = 1.0}, 0.0, t).value, 0.0);
  }
}

TEST(FisherInformation, CoherentHasNoVarianceTerm) {
  const ProbeState s{.R = 1.0, .theta = 0.25};
  const Medium m{};
  for (Target t : {Target::Detuning, Target::OpticalDepth}) {
    const FisherBreakdown f = fisher_information(s, m, 1.0, t);
    const ModelDerivatives d = model_derivatives(s, m, 1.0, t);
    EXPECT_EQ(f.var_term, 0.0);
    EXPECT_EQ(f.value, d.dmu * d.dmu);
  }
}

TEST(FisherInformation, BreakdownSums) {
  const FisherBreakdown f = fisher_information(
      {.R = 1.2, .theta = 0.3, .r = 0.6, .psi = -1.1}, {.T = 3.0, .n_sat = 0.5},
      0.7, Target::Detuning);
  EXPECT_GE(f.mean_term, 0.0);
  EXPECT_GT(f.var_term, 0.0);
  EXPECT_DOUBLE_EQ(f.value, f.mean_term + f.var_term);
}

TEST(FisherInformation, ReflectionInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const ProbeState s{.R = 10 * u(rng),
                       .theta = kPi * (2 * u(rng) - 1),
                       .r = 2 * u(rng),
                       .psi = kPi * (2 * u(rng) - 1)};
    const ProbeState m{s.R, -s.theta, s.r, -s.psi};
    const Medium med{.T = 0.01 + 50 * u(rng), .n_sat = 0.01 + 50 * u(rng)};
    const double d = 10 * u(rng) - 5;
    for (Target t : {Target::Detuning, Target::OpticalDepth}) {
      EXPECT_LE(rel(fisher_information(s, med, d, t).value,
                    fisher_information(m, med, -d, t).value),
                1e-10);
    }
  }
}

// Unsaturated coherent probe on resonance: only the attenuation carries
// information about T, so I = 4 nbar e^{-2 xi} (d xi / dT)^2.
TEST(FisherInformation, UnsaturatedOpticalDepthIdentity) {
  const double nbar = 4.0, T = 0.8;
  const Medium m{.T = T, .n_sat = 1e12};
  const ProbeState s{.R = 2.0, .theta = 0.0};
  const double g2 = 1.0 + nbar / m.n_sat;
  const double xi = 0.5 * T / g2;
  const double dxi = 0.5 / g2;
  const double expected = 4.0 * nbar * std::exp(-2.0 * xi) * dxi * dxi;
  EXPECT_NEAR(fisher_information(s, m, 0.0, Target::OpticalDepth).value / expected,
              1.0, 1e-9);
}

TEST(NumericOracle, LocationFamily) {
  const double i =
      numeric_fi_oracle([](double y) { return QuadratureStats{y, 1.0}; }, 0.3);
  EXPECT_NEAR(i, 1.0, 1e-8);
}

TEST(NumericOracle, LogVarianceFamily) {
  const double i = numeric_fi_oracle(
      [](double y) { return QuadratureStats{0.0, std::exp(2.0 * y)}; }, -0.4);
  EXPECT_NEAR(i, 2.0, 1e-8);
}

TEST(NumericOracle, SqueezedVacuumOpticalDepth) {
  const Medium m{.T = 1.0, .n_sat = 1.0};
  for (double psi : {0.0, kPi / 4, kPi / 2, -1.0}) {
    const ProbeState s{.R = 0.0, .theta = 0.0, .r = 1.0, .psi = psi};
    const double closed = fisher_information(s, m, 0.0, Target::OpticalDepth).value;
    const double numeric = numeric_fi_oracle(s, m, 0.0, Target::OpticalDepth);
    EXPECT_LT(rel(closed, numeric), 1e-6) << psi;
  }
}

TEST(NumericOracle, RandomCasesMatchClosedForm) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const ProbeState s{.R = 10 * u(rng),
                       .theta = kPi * (2 * u(rng) - 1),
                       .r = 2 * u(rng),
                       .psi = kPi * (2 * u(rng) - 1)};
    const Medium m{.T = std::exp(std::log(0.01) + u(rng) * std::log(1e4)),
                   .n_sat = std::exp(std::log(0.01) + u(rng) * std::log(1e4))};
    const double d = 10 * u(rng) - 5;
    const Target t = k % 2 ? Target::Detuning : Target::OpticalDepth;
    EXPECT_LT(rel(fisher_information(s, m, d, t).value,
                  numeric_fi_oracle(s, m, d, t)),
              1e-6)
        << k;
  }
}

TEST(NumericOracle, ReportsNonConvergence) {
  OracleGrid grid;
  grid.max_refinements = 0;
  grid.initial_panels = 1;
  grid.rel_tol = 1e-15;
  try {
    numeric_fi_oracle({.R = 3.0, .theta = 0.2, .r = 1.0, .psi = 0.3},
                      {.T = 2.0, .n_sat = 1.0}, 0.5, Target::Detuning, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IntegrationDidNotConverge);
  }
}

}  // namespace
}  // namespace nuqs
