#pragma once

#include <vector>

#include "kpzlab/fredholm.hpp"

namespace kpz {

/// Arguments of the crossover generating function: s is the shift of the
/// double-exponential test function, t > 0 the KPZ time.
struct CrossoverParams {
  double s = 0.0;
  double t = 1.0;

  /// (t/2)^{1/3}
  double scale() const;
  void validate() const;
};

/// lambda -> (1 + exp(-(t/2)^{1/3} lambda + s))^{-1}
class FermiFactor {
 public:
  explicit FermiFactor(const CrossoverParams& p);
  double operator()(double lambda) const;
  /// The lambda where the factor equals 1/2.
  double midpoint() const { return s_ / scale_; }
  double scale() const { return scale_; }

 private:
  double s_;
  double scale_;
};

struct KpzExactConstants {
  /// Both ends of the lambda integral are cut where the neglected integrand
  /// envelope falls below this.
  static constexpr double lambda_cut = 1e-18;
  static constexpr int panel_points = 32;
  static constexpr double panel_width = 2.0;
  /// Maximum disagreement between the two lambda resolutions.
  static constexpr double lambda_gap_limit = 1e-8;
  static constexpr int min_nodes = 20;
};

/// Ai envelope crossing: the smallest z with e^{-zeta}/(2 sqrt(pi) z^{1/4})
/// below KpzExactConstants::lambda_cut.
double airy_tail_cut();

/// K_{s,t}(x, y) = \int Fermi(lambda) Ai(x + lambda) Ai(y + lambda) dlambda.
double crossover_kernel(double x, double y, const CrossoverParams& p);

/// K_Ai(x, y) = \int_0^\infty Ai(x + lambda) Ai(y + lambda) dlambda.
double airy_kernel(double x, double y);

/// Kernel objects for the Fredholm engine, with grid evaluators that share
/// the Airy evaluations across matrix entries and decay envelopes for
/// truncating [lower, infinity).
KernelFunction make_crossover_kernel(const CrossoverParams& p);
KernelFunction make_airy_kernel();

/// det(1 - P_0 K_{s,t} P_0) on L^2([0, infinity)).
DeterminantResult kpz_genfun(const CrossoverParams& p, int m = FredholmDefaults::nodes);

/// F_GUE(sigma) = det(1 - K_Ai) on L^2([sigma, infinity)), clamped to [0, 1].
DeterminantResult tw_gue_cdf_result(double sigma, int m = FredholmDefaults::nodes,
                                    bool doubling_check = true);
double tw_gue_cdf(double sigma, int m = FredholmDefaults::nodes);

/// Median of F_GUE by bisection, with the determinant at each probe computed
/// at m and 2m nodes.
struct MedianResult {
  double median = 0.0;
  /// Largest |det_m - det_2m| met during the bisection.
  double max_doubling_gap = 0.0;
  int iterations = 0;
};
MedianResult tw_gue_median(int m = FredholmDefaults::nodes, double tol = 1e-10);

/// Tabulated F_GUE on a uniform grid with linear interpolation; also
/// provides mean and standard deviation by quadrature of the table.
class TwGueTable {
 public:
  TwGueTable(double lo = -9.0, double hi = 6.0, double step = 0.02,
             int m = FredholmDefaults::nodes);

  double cdf(double sigma) const;
  /// CDF of (xi - mean) / stddev.
  double standardized_cdf(double z) const { return cdf(mean_ + stddev_ * z); }
  double mean() const { return mean_; }
  double stddev() const { return stddev_; }
  double skewness() const { return skewness_; }

 private:
  double lo_;
  double step_;
  std::vector<double> values_;
  double mean_ = 0.0;
  double stddev_ = 1.0;
  double skewness_ = 0.0;
};

}  // namespace kpz
