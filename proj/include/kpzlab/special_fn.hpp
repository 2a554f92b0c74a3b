#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace kpz {

/// Accuracy contract and tuning constants of the special-function layer.
struct SpecialFnConstants {
  /// Supported argument range of the Airy functions is [-max_abs_x, max_abs_x].
  static constexpr double airy_max_abs_x = 200.0;
  /// Absolute error bound on [-30, 30] and relative bound outside it.
  static constexpr double airy_abs_tol = 1e-10;
  static constexpr double airy_rel_tol = 1e-8;
  /// Ai(x) for x above this comes from the modified Bessel function K.
  static constexpr double airy_bessel_from = 2.0;
  /// Below that, the Maclaurin series down to -airy_series_limit and the
  /// oscillatory asymptotic expansion further left.
  static constexpr double airy_series_limit = 10.0;
  /// Newton stopping tolerance for Gauss-Legendre nodes.
  static constexpr double gauss_newton_tol = 1e-15;
};

double airy_ai(double x);
double airy_ai_prime(double x);

struct AiryValues {
  double ai;
  double ai_prime;
};

/// Ai and Ai' together; cheaper than two separate calls.
AiryValues airy_ai_both(double x);

namespace detail {
// Exposed for the series/asymptotic overlap checks.
AiryValues airy_series(double x);
AiryValues airy_asymptotic(double x);
}  // namespace detail

/// Gauss-Legendre rule on [a, b].
class QuadratureRule {
 public:
  QuadratureRule(double a, double b, std::vector<double> nodes, std::vector<double> weights);

  double lower() const noexcept { return a_; }
  double upper() const noexcept { return b_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(nodes_[i]);
    return sum;
  }

 private:
  double a_;
  double b_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// m-point Gauss-Legendre rule mapped to [a, b]. Reference nodes on [-1, 1]
/// are computed once per m and cached.
QuadratureRule gauss_legendre(int m, double a, double b);

/// Concatenation of `points`-point Gauss-Legendre panels covering [a, b]
/// with panel widths at most `max_width`.
QuadratureRule composite_gauss_legendre(int points, double a, double b, double max_width);

}  // namespace kpz
