#include "nuqs/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "nuqs/error.hpp"
#include "parallel.hpp"

namespace nuqs {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(substream_seed(seed, stream)) {}

double NormalStream::operator()() {
  // Midpoint of one of 2^53 equal cells, so u is never 0 or 1.
  const double u =
      (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

GaussianFamily transmission_family(const ProbeState& state, const Medium& medium,
                                   double delta_bar, Target target) {
  const ProbeState probe = validate_state(state);
  validate_medium(medium);
  const double nbar = mean_photon_number(probe);
  auto at = [=](double y) {
    return target == Target::Detuning
               ? detail::response_unchecked(medium.T, medium.n_sat, y, nbar)
               : detail::response_unchecked(y, medium.n_sat, delta_bar, nbar);
  };
  GaussianFamily family;
  family.stats = [=](double y) {
    return detail::output_stats_unchecked(probe, at(y));
  };
  family.derivatives = [=](double y) {
    const Medium m = target == Target::Detuning
                         ? medium
                         : Medium{.T = y, .n_sat = medium.n_sat};
    const double delta = target == Target::Detuning ? y : delta_bar;
    return detail::derivatives_unchecked(probe, m, delta, target);
  };
  return family;
}

GaussianFamily normal_location_family() {
  return {
      .stats = [](double y) { return QuadratureStats{.mu = y, .v = 1.0}; },
      .derivatives = [](double) { return ModelDerivatives{.dmu = 1.0, .dv = 0.0}; },
  };
}

GaussianFamily normal_log_variance_family() {
  return {
      .stats =
          [](double y) { return QuadratureStats{.mu = 0.0, .v = std::exp(2.0 * y)}; },
      .derivatives =
          [](double y) {
            return ModelDerivatives{.dmu = 0.0, .dv = 2.0 * std::exp(2.0 * y)};
          },
  };
}

std::vector<double> sample_homodyne(const QuadratureStats& stats, std::size_t n,
                                    std::uint64_t seed) {
  if (!(stats.v > 0.0)) {
    throw Error(ErrorCode::NonPositiveVariance, "variance must be > 0");
  }
  NormalStream normal(seed, 0);
  const double sigma = std::sqrt(stats.v);
  std::vector<double> out(n);
  for (double& m : out) m = stats.mu + sigma * normal();
  return out;
}

namespace {

double resolve_truth(const std::optional<double>& configured, double fallback) {
  const double y = configured.value_or(fallback);
  if (!std::isfinite(y)) {
    throw Error(ErrorCode::InvalidConfig, "true value must be finite");
  }
  return y;
}

void check_sizes(const SimConfig& sim) {
  if (sim.n_samples < 1 || sim.n_repetitions < 1) {
    throw Error(ErrorCode::InvalidConfig,
                "n_samples and n_repetitions must be >= 1");
  }
}

// Per-repetition sums; combined in repetition order so the result does not
// depend on the thread count.
struct RepetitionSums {
  double score = 0.0;
  double score_sq = 0.0;
  double score_4th = 0.0;
  double estimate = 0.0;
  bool edge = false;
};

FisherEstimate combine_scores(const std::vector<RepetitionSums>& reps,
                              std::size_t samples) {
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (const auto& r : reps) {
    s1 += r.score;
    s2 += r.score_sq;
    s4 += r.score_4th;
  }
  const double n = static_cast<double>(samples);
  FisherEstimate est;
  est.samples = samples;
  est.value = s2 / n;
  est.score_mean = s1 / n;
  const double denom = std::max(n - 1.0, 1.0);
  est.standard_error =
      std::sqrt(std::max(s4 / n - est.value * est.value, 0.0) / denom);
  est.score_mean_se =
      std::sqrt(std::max(est.value - est.score_mean * est.score_mean, 0.0) / denom);
  return est;
}

// Draws one repetition and accumulates its score moments. Outcomes are
// mu + sqrt(v) z, so the deviation from the mean is sqrt(v) z exactly.
void accumulate_scores(const QuadratureStats& at, const ModelDerivatives& d,
                       std::size_t n, NormalStream& normal,
                       RepetitionSums& sums, double& sum_dev,
                       double& sum_dev2) {
  const double sigma = std::sqrt(at.v);
  const double a = d.dmu / at.v;
  const double b = d.dv / (2.0 * at.v * at.v);
  for (std::size_t k = 0; k < n; ++k) {
    const double dev = sigma * normal();
    const double score = a * dev + b * (dev * dev - at.v);
    sums.score += score;
    sums.score_sq += score * score;
    sums.score_4th += score * score * score * score;
    sum_dev += dev;
    sum_dev2 += dev * dev;
  }
}

// Negative log-likelihood of n Gaussian outcomes, from the first two power
// sums of their deviations from mu0.
struct DeviationSums {
  double mu0 = 0.0;
  double n = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
};

double negative_log_likelihood(const QuadratureStats& s,
                               const DeviationSums& data) {
  const double shift = s.mu - data.mu0;
  const double ss =
      data.sum_sq - 2.0 * shift * data.sum + data.n * shift * shift;
  return 0.5 * ss / s.v + 0.5 * data.n * std::log(s.v);
}

double maximise_likelihood(const GaussianFamily& family, double lo, double hi,
                           const DeviationSums& data) {
  auto nll = [&](double y) {
    const QuadratureStats s = family.stats(y);
    if (!(s.v > 0.0)) return std::numeric_limits<double>::infinity();
    return negative_log_likelihood(s, data);
  };

  constexpr int kScan = 64;
  const double step = (hi - lo) / kScan;
  int best = 0;
  double best_value = nll(lo);
  for (int k = 1; k <= kScan; ++k) {
    const double value = nll(lo + k * step);
    if (value < best_value) {
      best_value = value;
      best = k;
    }
  }

  double a = lo + std::max(best - 1, 0) * step;
  double b = lo + std::min(best + 1, kScan) * step;
  const double tol = 1e-10 * (hi - lo);
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = nll(c);
  double fd = nll(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = nll(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = nll(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

FisherEstimate empirical_fisher(const GaussianFamily& family, double y_true,
                                const SimConfig& sim) {
  check_sizes(sim);
  const QuadratureStats at = family.stats(y_true);
  if (!(at.v > 0.0)) {
    throw Error(ErrorCode::NonPositiveVariance, "variance must be > 0");
  }
  const ModelDerivatives d = family.derivatives(y_true);
  std::vector<RepetitionSums> reps(sim.n_repetitions);
  detail::parallel_for(reps.size(), sim.threads, [&](std::size_t k) {
    NormalStream normal(sim.seed, k);
    double sum_dev = 0.0, sum_dev2 = 0.0;
    accumulate_scores(at, d, sim.n_samples, normal, reps[k], sum_dev, sum_dev2);
  });
  return combine_scores(reps, sim.n_samples * sim.n_repetitions);
}

FisherEstimate empirical_fisher(const ProbeState& state, const Medium& medium,
                                double delta_bar, Target target,
                                const SimConfig& sim) {
  const double fallback = target == Target::Detuning ? delta_bar : medium.T;
  return empirical_fisher(transmission_family(state, medium, delta_bar, target),
                          resolve_truth(sim.true_value, fallback), sim);
}

EstimatorReport crb_check(const GaussianFamily& family, double y_true,
                          const SimConfig& sim) {
  check_sizes(sim);
  const QuadratureStats at = family.stats(y_true);
  if (!(at.v > 0.0)) {
    throw Error(ErrorCode::NonPositiveVariance, "variance must be > 0");
  }
  const ModelDerivatives d = family.derivatives(y_true);
  const double info = gaussian_fisher(at.mu, at.v, d.dmu, d.dv).value;
  if (!(info > 0.0)) {
    throw Error(ErrorCode::InvalidConfig,
                "analytic Fisher information is zero at the true value");
  }

  EstimatorReport report;
  report.true_value = y_true;
  report.n_samples = sim.n_samples;
  report.n_repetitions = sim.n_repetitions;
  report.seed = sim.seed;
  report.analytic_fisher = info;
  const double half_width =
      10.0 / std::sqrt(static_cast<double>(sim.n_samples) * info);
  report.bracket_lo = sim.bracket_lo.value_or(y_true - half_width);
  report.bracket_hi = sim.bracket_hi.value_or(y_true + half_width);
  if (!(report.bracket_lo < y_true && y_true < report.bracket_hi)) {
    throw Error(ErrorCode::InvalidConfig, "bracket must contain the true value");
  }

  const double n = static_cast<double>(sim.n_samples);
  const double width = report.bracket_hi - report.bracket_lo;
  std::vector<RepetitionSums> reps(sim.n_repetitions);
  detail::parallel_for(reps.size(), sim.threads, [&](std::size_t k) {
    NormalStream normal(sim.seed, k);
    DeviationSums data{.mu0 = at.mu, .n = n};
    accumulate_scores(at, d, sim.n_samples, normal, reps[k], data.sum,
                      data.sum_sq);
    const double estimate = maximise_likelihood(
        family, report.bracket_lo, report.bracket_hi, data);
    reps[k].estimate = estimate;
    reps[k].edge = estimate - report.bracket_lo < 1e-6 * width ||
                   report.bracket_hi - estimate < 1e-6 * width;
  });

  report.empirical = combine_scores(reps, sim.n_samples * sim.n_repetitions);

  const double count = static_cast<double>(reps.size());
  double mean = 0.0;
  for (const auto& r : reps) mean += r.estimate;
  mean /= count;
  double m2 = 0.0, m4 = 0.0;
  for (const auto& r : reps) {
    const double dev = r.estimate - mean;
    m2 += dev * dev;
    m4 += dev * dev * dev * dev;
    report.edge_hits += r.edge ? 1 : 0;
  }
  m4 /= count;
  const double variance = m2 / std::max(count - 1.0, 1.0);
  report.mle_mean = mean;
  report.mle_variance = variance;
  report.mle_variance_se =
      std::sqrt(std::max(m4 - (m2 / count) * (m2 / count), 0.0) / count);
  report.crb_ratio = 1.0 / (n * variance * info);
  report.crb_ratio_se =
      variance > 0.0 ? report.crb_ratio * report.mle_variance_se / variance : 0.0;

  if (static_cast<double>(report.edge_hits) > 0.01 * count) {
    throw Error(ErrorCode::BracketExcludesOptimum,
                std::to_string(report.edge_hits) + " of " +
                    std::to_string(reps.size()) +
                    " estimates hit the bracket edge");
  }
  return report;
}

EstimatorReport crb_check(const ProbeState& state, const Medium& medium,
                          double delta_bar, Target target, const SimConfig& sim) {
  const double fallback = target == Target::Detuning ? delta_bar : medium.T;
  return crb_check(transmission_family(state, medium, delta_bar, target),
                   resolve_truth(sim.true_value, fallback), sim);
}

}  // namespace nuqs
