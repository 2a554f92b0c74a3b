#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace kpz {

/// Scalar Monte Carlo observables with provenance.
struct SampleSet {
  std::vector<double> values;
  std::string label;
  /// Free-form provenance: seeds, parameters.
  std::map<std::string, std::string> seed_provenance;

  /// Throws ArgumentError when empty or when a value is not finite.
  void validate() const;
};

/// Fraction of values <= x.
double ecdf(const SampleSet& s, double x);

using Cdf = std::function<double(double)>;

/// sup_x |F_n(x) - F(x)|, evaluated at the jumps of F_n from both sides.
double ks_distance(const SampleSet& s, const Cdf& cdf);

/// sup_x |F_n(x) - G_m(x)| for two samples.
double ks_distance_two_sample(const SampleSet& a, const SampleSet& b);

SampleSet standardize(const SampleSet& s);

double sample_mean(std::span<const double> v);
/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> v);
/// Moment skewness m3 / m2^{3/2}.
double sample_skewness(std::span<const double> v);

using Statistic = std::function<double(std::span<const double>)>;

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap interval at level 1 - alpha from B resamples.
ConfidenceInterval bootstrap_ci(const SampleSet& s, const Statistic& statistic, int resamples,
                                double alpha, std::uint64_t seed);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace kpz
