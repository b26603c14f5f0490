#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "nuqs/fisher.hpp"
#include "nuqs/medium.hpp"
#include "nuqs/probe_state.hpp"

namespace nuqs {

/// Standard-normal draws for one substream. Substream seeds are a SplitMix64
/// hash of (seed, stream), so substreams are independent of evaluation order.
/// Normals use the inverse CDF of a 53-bit uniform on (0, 1).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  double operator()();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// A one-parameter Gaussian outcome family Y -> (mu, v) with its derivatives.
struct GaussianFamily {
  std::function<QuadratureStats(double)> stats;
  std::function<ModelDerivatives(double)> derivatives;
};

/// Homodyne outcomes of the transmission model as a function of the target
/// parameter, at a fixed probe. `y` replaces delta_bar or T.
GaussianFamily transmission_family(const ProbeState& state, const Medium& medium,
                                   double delta_bar, Target target);
/// Normal(Y, 1): Fisher information 1.
GaussianFamily normal_location_family();
/// Normal(0, e^{2Y}): Fisher information 2.
GaussianFamily normal_log_variance_family();

struct SimConfig {
  std::size_t n_samples = 100;
  std::size_t n_repetitions = 10000;
  std::uint64_t seed = 0;
  Target target = Target::Detuning;
  /// True parameter. When unset, the operating point's delta_bar (or T)
  /// is used.
  std::optional<double> true_value;
  /// MLE search interval; defaults to true_value +- 10 analytic standard
  /// errors for n_samples when unset.
  std::optional<double> bracket_lo;
  std::optional<double> bracket_hi;
  int threads = 1;
};

/// n draws from Normal(mu, v). Throws Error{NonPositiveVariance}.
std::vector<double> sample_homodyne(const QuadratureStats& stats, std::size_t n,
                                    std::uint64_t seed);

struct FisherEstimate {
  double value = 0.0;           ///< mean squared score
  double standard_error = 0.0;
  double score_mean = 0.0;
  double score_mean_se = 0.0;
  std::size_t samples = 0;
};

/// Mean squared score over n_samples * n_repetitions draws at the true
/// parameter; repetition k uses substream k.
FisherEstimate empirical_fisher(const GaussianFamily& family, double y_true,
                                const SimConfig& sim);
FisherEstimate empirical_fisher(const ProbeState& state, const Medium& medium,
                                double delta_bar, Target target,
                                const SimConfig& sim);

struct EstimatorReport {
  double true_value = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_repetitions = 0;
  std::uint64_t seed = 0;
  double analytic_fisher = 0.0;  ///< per sample
  FisherEstimate empirical;
  double mle_mean = 0.0;
  double mle_variance = 0.0;
  double mle_variance_se = 0.0;
  /// 1 / (n_samples * mle_variance * analytic_fisher); 1 for an efficient
  /// estimator.
  double crb_ratio = 0.0;
  double crb_ratio_se = 0.0;
  std::size_t edge_hits = 0;
};

/// Runs n_repetitions simulated experiments of n_samples outcomes each and
/// estimates the parameter by maximum likelihood (coarse scan of the bracket,
/// then golden-section refinement). The same draws feed the empirical Fisher
/// information. Throws Error{BracketExcludesOptimum} if more than 1% of the
/// estimates land on a bracket edge.
EstimatorReport crb_check(const GaussianFamily& family, double y_true,
                          const SimConfig& sim);
EstimatorReport crb_check(const ProbeState& state, const Medium& medium,
                          double delta_bar, Target target, const SimConfig& sim);

}  // namespace nuqs
