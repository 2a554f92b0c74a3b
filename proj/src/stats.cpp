#include "kpzlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kpzlab/errors.hpp"
#include "kpzlab/rng.hpp"

namespace kpz {

void SampleSet::validate() const {
  if (values.empty()) throw ArgumentError("SampleSet '" + label + "' is empty");
  for (const double v : values)
    if (!std::isfinite(v)) throw ArgumentError("SampleSet '" + label + "' has a non-finite value");
}

double ecdf(const SampleSet& s, double x) {
  s.validate();
  const auto count = std::count_if(s.values.begin(), s.values.end(), [x](double v) { return v <= x; });
  return static_cast<double>(count) / static_cast<double>(s.values.size());
}

double ks_distance(const SampleSet& s, const Cdf& cdf) {
  s.validate();
  std::vector<double> sorted = s.values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // Only the last of a run of ties carries the full jump.
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    std::size_t first = i;
    while (first > 0 && sorted[first - 1] == sorted[i]) --first;
    const double f = cdf(sorted[i]);
    const double below = static_cast<double>(first) / n;
    const double at = static_cast<double>(i + 1) / n;
    d = std::max({d, std::abs(at - f), std::abs(f - below)});
  }
  return d;
}

double ks_distance_two_sample(const SampleSet& a, const SampleSet& b) {
  a.validate();
  b.validate();
  std::vector<double> x = a.values, y = b.values;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double sample_mean(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("sample_mean: empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw ArgumentError("sample_variance: need at least two values");
  const double m = sample_mean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

double sample_skewness(std::span<const double> v) {
  if (v.size() < 3) throw ArgumentError("sample_skewness: need at least three values");
  const double m = sample_mean(v);
  double m2 = 0.0, m3 = 0.0;
  for (const double x : v) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double n = static_cast<double>(v.size());
  m2 /= n;
  m3 /= n;
  if (m2 == 0.0) throw ArgumentError("sample_skewness: zero variance");
  return m3 / std::pow(m2, 1.5);
}

SampleSet standardize(const SampleSet& s) {
  s.validate();
  const double m = sample_mean(s.values);
  const double var = s.values.size() > 1 ? sample_variance(s.values) : 0.0;
  if (!(var > 0.0)) throw ArgumentError("standardize: zero variance in '" + s.label + "'");
  const double sd = std::sqrt(var);
  SampleSet out = s;
  for (double& v : out.values) v = (v - m) / sd;
  out.seed_provenance["standardized"] = "mean/sd";
  return out;
}

ConfidenceInterval bootstrap_ci(const SampleSet& s, const Statistic& statistic, int resamples,
                                double alpha, std::uint64_t seed) {
  s.validate();
  if (resamples < 200) throw ArgumentError("bootstrap_ci: need at least 200 resamples", {{"B", resamples}});
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("bootstrap_ci: alpha must lie in (0, 1)", {{"alpha", alpha}});
  const std::size_t n = s.values.size();
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  std::vector<double> draw(n);
  Rng rng(seed);
  for (auto& out : stats) {
    for (std::size_t i = 0; i < n; ++i) draw[i] = s.values[rng.below(n)];
    out = statistic(draw);
  }
  std::sort(stats.begin(), stats.end());
  // Type-7 (linear) sample quantiles.
  auto quantile = [&](double p) {
    const double h = (static_cast<double>(stats.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, stats.size() - 1);
    return stats[lo] + (h - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
  };
  return {quantile(alpha / 2.0), quantile(1.0 - alpha / 2.0)};
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("loglog_slope: need >= 2 paired points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw ArgumentError("loglog_slope: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double mx = sample_mean(lx), my = sample_mean(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace kpz
