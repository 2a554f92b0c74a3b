#include "kpzlab/special_fn.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>

#include "kpzlab/errors.hpp"

namespace kpz {
namespace {

using C = SpecialFnConstants;

// Ai(0) and -Ai'(0).
constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kMinusAip0 = 0.258819403792806798405183560189203963L;

void check_airy_argument(double x, const char* who) {
  if (!(std::abs(x) <= C::airy_max_abs_x)) {
    std::ostringstream msg;
    msg << who << ": argument " << x << " outside supported interval [" << -C::airy_max_abs_x
        << ", " << C::airy_max_abs_x << "]";
    throw DomainError(msg.str(), {{"x", x}});
  }
}

// Coefficients u_k of the Airy asymptotic expansions; v_k = -(6k+1)/(6k-1) u_k.
struct AsymptoticCoefficients {
  static constexpr int count = 40;
  long double u[count];
  long double v[count];

  constexpr AsymptoticCoefficients() : u{}, v{} {
    u[0] = 1.0L;
    v[0] = 1.0L;
    for (int k = 1; k < count; ++k) {
      const long double kk = k;
      u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216.0L * kk);
      v[k] = -(6 * kk + 1) / (6 * kk - 1) * u[k];
    }
  }
};

constexpr AsymptoticCoefficients kAsym{};

// Sums sum_k (-1)^k c[k] z^{-k} starting at `first`, stepping by `stride`,
// with alternating sign between kept terms, stopping at the smallest term.
long double truncated_series(const long double* c, int first, int stride, long double zeta) {
  long double sum = 0.0L;
  long double last = INFINITY;
  int sign = 1;
  for (int k = first; k < AsymptoticCoefficients::count; k += stride) {
    const long double term = c[k] * std::pow(zeta, -k);
    if (std::abs(term) >= last) break;
    sum += sign * term;
    last = std::abs(term);
    if (last < 1e-21L * std::abs(sum)) break;
    sign = -sign;
  }
  return sum;
}

// Ai = Ai(0) f - (-Ai'(0)) g with f, g the two Maclaurin solutions of
// y'' = x y. The partial sums exceed the result by up to e^{2|x|^{3/2}/3},
// so T must carry enough digits for the requested x.
template <class T>
AiryValues maclaurin(double xd) {
  const T x = xd;
  const T x3 = x * x * x;
  T f = 1, g = x;
  T tf = 1, tg = x, tfp = x * x / 2, tgp = 1;
  T fp = tfp, gp = 1;
  for (int k = 1; k < 400; ++k) {
    const T kk = 3 * k;
    tf *= x3 / ((kk - 1) * kk);
    tg *= x3 / (kk * (kk + 1));
    f += tf;
    g += tg;
    if (k >= 2) {
      tfp *= x3 / ((kk - 3) * (kk - 1));
      fp += tfp;
    }
    tgp *= x3 / (kk * (kk - 2));
    gp += tgp;
    const auto mag = [](T v) { return v < 0 ? static_cast<long double>(-v) : static_cast<long double>(v); };
    const long double scale = mag(f) + mag(g) + mag(fp) + mag(gp);
    if (mag(tf) + mag(tg) + mag(tfp) + mag(tgp) < 1e-34L * scale) break;
  }
  return {static_cast<double>(T(kAi0) * f - T(kMinusAip0) * g),
          static_cast<double>(T(kAi0) * fp - T(kMinusAip0) * gp)};
}

// Ai(x) = sqrt(x/3) K_{1/3}(zeta) / pi, Ai'(x) = -x K_{2/3}(zeta) / (pi sqrt 3).
AiryValues airy_bessel(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  return {std::sqrt(x / 3.0) / std::numbers::pi * std::cyl_bessel_k(1.0 / 3.0, zeta),
          -x / (std::numbers::pi * std::numbers::sqrt3) * std::cyl_bessel_k(2.0 / 3.0, zeta)};
}

}  // namespace

namespace detail {

AiryValues airy_series(double x) {
  // Extended precision is enough while the cancellation stays below ~1e5;
  // beyond that the sums go to quad precision (software, ~10x slower).
  if (std::abs(x) <= 3.0) return maclaurin<long double>(x);
  return maclaurin<__float128>(x);
}

AiryValues airy_asymptotic(double xd) {
  const long double x = xd;
  const long double inv_sqrt_pi = 1.0L / std::sqrt(std::numbers::pi_v<long double>);
  if (x > 0.0L) {
    const long double zeta = 2.0L / 3.0L * x * std::sqrt(x);
    const long double q = std::sqrt(std::sqrt(x));
    const long double decay = std::exp(-zeta);
    const long double su = truncated_series(kAsym.u, 0, 1, zeta);
    const long double sv = truncated_series(kAsym.v, 0, 1, zeta);
    return {static_cast<double>(0.5L * inv_sqrt_pi * decay / q * su),
            static_cast<double>(-0.5L * inv_sqrt_pi * q * decay * sv)};
  }
  const long double z = -x;
  const long double zeta = 2.0L / 3.0L * z * std::sqrt(z);
  const long double q = std::sqrt(std::sqrt(z));
  const long double phase = zeta - 0.25L * std::numbers::pi_v<long double>;
  const long double c = std::cos(phase), s = std::sin(phase);
  const long double p_even = truncated_series(kAsym.u, 0, 2, zeta);
  const long double p_odd = truncated_series(kAsym.u, 1, 2, zeta);
  const long double r_even = truncated_series(kAsym.v, 0, 2, zeta);
  const long double r_odd = truncated_series(kAsym.v, 1, 2, zeta);
  return {static_cast<double>(inv_sqrt_pi / q * (c * p_even + s * p_odd)),
          static_cast<double>(inv_sqrt_pi * q * (s * r_even - c * r_odd))};
}

}  // namespace detail

AiryValues airy_ai_both(double x) {
  check_airy_argument(x, "airy_ai");
  if (x > C::airy_bessel_from) return airy_bessel(x);
  if (x >= -C::airy_series_limit) return detail::airy_series(x);
  return detail::airy_asymptotic(x);
}

double airy_ai(double x) { return airy_ai_both(x).ai; }

double airy_ai_prime(double x) {
  check_airy_argument(x, "airy_ai_prime");
  return airy_ai_both(x).ai_prime;
}

QuadratureRule::QuadratureRule(double a, double b, std::vector<double> nodes,
                               std::vector<double> weights)
    : a_(a), b_(b), nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.size() != weights_.size())
    throw ArgumentError("QuadratureRule: nodes and weights differ in length");
}

namespace {

struct ReferenceRule {
  std::vector<double> nodes;  // ascending on (-1, 1)
  std::vector<double> weights;
};

ReferenceRule compute_reference_rule(int m) {
  ReferenceRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess for the (i+1)-th largest root.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= m; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      const double pm = m == 1 ? x : p1;
      const double pm1 = m == 1 ? 1.0 : p0;
      dp = m * (x * pm - pm1) / (x * x - 1.0);
      const double dx = pm / dp;
      x -= dx;
      if (std::abs(dx) <= SpecialFnConstants::gauss_newton_tol) break;
    }
    // Derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int n = 2; n <= m; ++n) {
      const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    dp = m == 1 ? 1.0 : m * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[m - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[m - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

std::shared_ptr<const ReferenceRule> reference_rule(int m) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ReferenceRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) slot = std::make_shared<const ReferenceRule>(compute_reference_rule(m));
  return slot;
}

}  // namespace

QuadratureRule gauss_legendre(int m, double a, double b) {
  if (m < 1) throw ArgumentError("gauss_legendre: node count must be >= 1", {{"m", m}});
  if (!(a < b)) throw ArgumentError("gauss_legendre: require a < b", {{"a", a}, {"b", b}});
  const auto ref = reference_rule(m);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::vector<double> nodes(m), weights(m);
  for (int i = 0; i < m; ++i) {
    nodes[i] = mid + half * ref->nodes[i];
    weights[i] = half * ref->weights[i];
  }
  return QuadratureRule(a, b, std::move(nodes), std::move(weights));
}

QuadratureRule composite_gauss_legendre(int points, double a, double b, double max_width) {
  if (!(a < b)) throw ArgumentError("composite_gauss_legendre: require a < b", {{"a", a}, {"b", b}});
  if (!(max_width > 0.0)) throw ArgumentError("composite_gauss_legendre: panel width must be > 0");
  const auto panels = static_cast<int>(std::ceil((b - a) / max_width - 1e-12));
  const int count = panels < 1 ? 1 : panels;
  const double width = (b - a) / count;
  std::vector<double> nodes, weights;
  nodes.reserve(static_cast<std::size_t>(count) * points);
  weights.reserve(nodes.capacity());
  for (int p = 0; p < count; ++p) {
    const double lo = a + p * width;
    const double hi = p + 1 == count ? b : a + (p + 1) * width;
    const auto panel = gauss_legendre(points, lo, hi);
    nodes.insert(nodes.end(), panel.nodes().begin(), panel.nodes().end());
    weights.insert(weights.end(), panel.weights().begin(), panel.weights().end());
  }
  return QuadratureRule(a, b, std::move(nodes), std::move(weights));
}

}  // namespace kpz
