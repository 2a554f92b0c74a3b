#include "kpzlab/kpz_exact.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "kpzlab/errors.hpp"

namespace kpz {

double CrossoverParams::scale() const { return std::cbrt(t / 2.0); }

void CrossoverParams::validate() const {
  if (!(t > 0.0) || !std::isfinite(t))
    throw ArgumentError("CrossoverParams: t must be positive and finite", {{"t", t}});
  if (!std::isfinite(s)) throw ArgumentError("CrossoverParams: s must be finite", {{"s", s}});
}

FermiFactor::FermiFactor(const CrossoverParams& p) : s_(p.s), scale_(p.scale()) { p.validate(); }

double FermiFactor::operator()(double lambda) const {
  const double z = -scale_ * lambda + s_;
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double airy_tail_cut() {
  static const double cut = [] {
    auto envelope = [](double z) {
      const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
      return std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi) * std::sqrt(std::sqrt(z)));
    };
    double lo = 1.0, hi = 40.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
      const double mid = 0.5 * (lo + hi);
      (envelope(mid) < KpzExactConstants::lambda_cut ? hi : lo) = mid;
    }
    return hi;
  }();
  return cut;
}

namespace {

using KC = KpzExactConstants;

// Gram factor B with K = B B^T: B(i, k) = Ai(x_i + lambda_k) sqrt(w_k f(lambda_k)).
template <class Weight>
Eigen::MatrixXd gram_factor(std::span<const double> nodes, const QuadratureRule& rule,
                            Weight&& weight) {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  const auto n = static_cast<Eigen::Index>(rule.size());
  Eigen::MatrixXd b(m, n);
  const auto lam = rule.nodes();
  const auto w = rule.weights();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double root = std::sqrt(w[k] * weight(lam[k]));
    for (Eigen::Index i = 0; i < m; ++i) {
      const double z = nodes[i] + lam[k];
      // Ai(z) < 1e-290 beyond this; skip the evaluation.
      b(i, k) = z > 100.0 ? 0.0 : root * airy_ai(z);
    }
  }
  return b;
}

struct LambdaRange {
  double lower;
  double upper;
};

// Integral over lambda in [range] of weight(lambda) Ai(x_i+lambda) Ai(x_j+lambda)
// at two panel resolutions; throws when they disagree.
template <class Weight>
Eigen::MatrixXd lambda_integral_matrix(std::span<const double> nodes, LambdaRange range,
                                       double panel_width, Weight&& weight, const char* who,
                                       Error::Details diag) {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  if (!(range.lower < range.upper)) return Eigen::MatrixXd::Zero(m, m);
  const auto coarse_rule =
      composite_gauss_legendre(KC::panel_points, range.lower, range.upper, panel_width);
  const auto fine_rule =
      composite_gauss_legendre(KC::panel_points, range.lower, range.upper, 0.5 * panel_width);
  const Eigen::MatrixXd bc = gram_factor(nodes, coarse_rule, weight);
  const Eigen::MatrixXd bf = gram_factor(nodes, fine_rule, weight);
  Eigen::MatrixXd coarse = bc * bc.transpose();
  Eigen::MatrixXd fine = bf * bf.transpose();
  const double gap = (coarse - fine).cwiseAbs().maxCoeff();
  if (!(gap <= KC::lambda_gap_limit)) {
    diag["gap"] = gap;
    diag["lambda_lower"] = range.lower;
    diag["lambda_upper"] = range.upper;
    throw NumericError(std::string(who) + ": lambda quadrature did not converge", std::move(diag));
  }
  return fine;
}

double min_node(std::span<const double> nodes) {
  return *std::min_element(nodes.begin(), nodes.end());
}

Eigen::MatrixXd crossover_grid(std::span<const double> nodes, const CrossoverParams& p) {
  if (nodes.empty()) return {};
  if (min_node(nodes) < 0.0)
    throw ArgumentError("crossover_kernel: arguments must be >= 0", {{"x", min_node(nodes)}});
  const FermiFactor fermi(p);
  const double c = fermi.scale();
  const LambdaRange range{(p.s + std::log(KC::lambda_cut)) / c, airy_tail_cut() - min_node(nodes)};
  // The Fermi factor has poles at distance pi/c from the real axis; panels
  // no wider than 4 pi / c keep 32-point rules converged to ~1e-13.
  const double width = std::min(KC::panel_width, 4.0 * std::numbers::pi / c);
  return lambda_integral_matrix(nodes, range, width, fermi, "crossover_kernel",
                                {{"s", p.s}, {"t", p.t}});
}

Eigen::MatrixXd airy_grid(std::span<const double> nodes) {
  if (nodes.empty()) return {};
  const LambdaRange range{0.0, airy_tail_cut() - min_node(nodes)};
  return lambda_integral_matrix(nodes, range, KC::panel_width, [](double) { return 1.0; },
                                "airy_kernel", {});
}

// Cache of crossover kernel matrices keyed by (s, t, node set).
class CrossoverCache {
 public:
  using Key = std::tuple<double, double, std::size_t, double, double>;

  std::shared_ptr<const Eigen::MatrixXd> find(const Key& key) {
    std::lock_guard lock(mutex_);
    for (const auto& [k, v] : entries_)
      if (k == key) return v;
    return nullptr;
  }

  void insert(const Key& key, std::shared_ptr<const Eigen::MatrixXd> value) {
    std::lock_guard lock(mutex_);
    if (entries_.size() >= kCapacity) entries_.pop_front();
    entries_.emplace_back(key, std::move(value));
  }

 private:
  static constexpr std::size_t kCapacity = 16;
  std::mutex mutex_;
  std::deque<std::pair<Key, std::shared_ptr<const Eigen::MatrixXd>>> entries_;
};

CrossoverCache& crossover_cache() {
  static CrossoverCache cache;
  return cache;
}

// Upper bound on K_{s,t}(x, x): the Fermi factor is below min(1, e^{c lambda - s}).
double crossover_envelope(double x, const CrossoverParams& p) {
  const double c = p.scale();
  const double knee = x + p.s / c;
  const double u_hi = airy_tail_cut();
  const double u_lo =
      std::max(x + (p.s + std::log(KC::lambda_cut)) / c, -SpecialFnConstants::airy_max_abs_x);
  double total = 0.0;
  const double left_hi = std::min(knee, u_hi);
  if (u_lo < left_hi) {
    const auto rule = composite_gauss_legendre(KC::panel_points, u_lo, left_hi, KC::panel_width);
    total += rule.integrate([&](double u) {
      const double ai = airy_ai(u);
      return std::exp(c * (u - x) - p.s) * ai * ai;
    });
  }
  const double right_lo = std::max(knee, u_lo);
  if (right_lo < u_hi) {
    const auto rule = composite_gauss_legendre(KC::panel_points, right_lo, u_hi, KC::panel_width);
    total += rule.integrate([](double u) {
      const double ai = airy_ai(u);
      return ai * ai;
    });
  }
  return total;
}

double airy_diagonal_envelope(double x) {
  if (x < -SpecialFnConstants::airy_max_abs_x) return 1e300;
  if (x > 100.0) return 0.0;
  const auto v = airy_ai_both(x);
  return std::max(v.ai_prime * v.ai_prime - x * v.ai * v.ai, 0.0);
}

}  // namespace

double crossover_kernel(double x, double y, const CrossoverParams& p) {
  const double nodes[2] = {x, y};
  return crossover_grid(nodes, p)(0, 1);
}

double airy_kernel(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw ArgumentError("airy_kernel: arguments must be finite", {{"x", x}, {"y", y}});
  const double nodes[2] = {x, y};
  return airy_grid(nodes)(0, 1);
}

KernelFunction make_crossover_kernel(const CrossoverParams& p) {
  p.validate();
  KernelFunction k([p](double x, double y) { return crossover_kernel(x, y, p); },
                   "crossover");
  k.with_domain({0.0, INFINITY});
  k.with_decay({[p](double x) { return crossover_envelope(x, p); }, false});
  k.with_grid([p](std::span<const double> nodes) -> Eigen::MatrixXd {
    if (nodes.empty()) return {};
    const CrossoverCache::Key key{p.s, p.t, nodes.size(), nodes.front(), nodes.back()};
    auto& cache = crossover_cache();
    if (auto hit = cache.find(key)) return *hit;
    auto value = std::make_shared<const Eigen::MatrixXd>(crossover_grid(nodes, p));
    cache.insert(key, value);
    return *value;
  });
  return k;
}

KernelFunction make_airy_kernel() {
  KernelFunction k([](double x, double y) { return airy_kernel(x, y); }, "airy");
  k.with_decay({airy_diagonal_envelope, false});
  k.with_grid(airy_grid);
  return k;
}

DeterminantResult kpz_genfun(const CrossoverParams& p, int m) {
  p.validate();
  if (m < KC::min_nodes) throw ArgumentError("kpz_genfun: need m >= 20", {{"m", m}});
  const auto kernel = make_crossover_kernel(p);
  const auto domain = truncate_domain(kernel, 0.0);
  auto result = fredholm_det(kernel, domain, m);
  if (result.value > 1.0 && result.value < 1.0 + 1e-12) result.value = 1.0;
  return result;
}

DeterminantResult tw_gue_cdf_result(double sigma, int m, bool doubling_check) {
  if (!std::isfinite(sigma)) throw ArgumentError("tw_gue_cdf: sigma must be finite");
  if (m < KC::min_nodes) throw ArgumentError("tw_gue_cdf: need m >= 20", {{"m", m}});
  const auto kernel = make_airy_kernel();
  const auto domain = truncate_domain(kernel, sigma);
  FredholmOptions options;
  options.doubling_check = doubling_check;
  auto result = fredholm_det(kernel, domain, m, options);
  result.value = std::clamp(result.value, 0.0, 1.0);
  return result;
}

double tw_gue_cdf(double sigma, int m) { return tw_gue_cdf_result(sigma, m).value; }

MedianResult tw_gue_median(int m, double tol) {
  MedianResult out;
  double lo = -3.0, hi = -1.0;
  auto probe = [&](double sigma) {
    const auto r = tw_gue_cdf_result(sigma, m, true);
    out.max_doubling_gap = std::max(out.max_doubling_gap, r.doubling_gap);
    return r.value;
  };
  if (!(probe(lo) < 0.5 && probe(hi) > 0.5))
    throw NumericError("tw_gue_median: median not bracketed by [-3, -1]");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (probe(mid) < 0.5 ? lo : hi) = mid;
    ++out.iterations;
  }
  out.median = 0.5 * (lo + hi);
  return out;
}

TwGueTable::TwGueTable(double lo, double hi, double step, int m) : lo_(lo), step_(step) {
  if (!(lo < hi) || !(step > 0.0)) throw ArgumentError("TwGueTable: invalid grid");
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  values_.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    values_[i] = tw_gue_cdf_result(lo + step * static_cast<double>(i), m, false).value;
  for (std::size_t i = 1; i < count; ++i) values_[i] = std::max(values_[i], values_[i - 1]);

  // Raw moments from E[xi^k] = [x^k F]_lo^hi - k \int x^{k-1} F dx.
  auto integrate = [&](int power) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < count; ++i) {
      const double x0 = lo + step * static_cast<double>(i);
      const double x1 = x0 + step;
      sum += 0.5 * step *
             (std::pow(x0, power) * values_[i] + std::pow(x1, power) * values_[i + 1]);
    }
    return sum;
  };
  const double xl = lo, xh = lo + step * static_cast<double>(count - 1);
  const double fl = values_.front(), fh = values_.back();
  const double m1 = xh * fh - xl * fl - integrate(0);
  const double m2 = xh * xh * fh - xl * xl * fl - 2.0 * integrate(1);
  const double m3 = xh * xh * xh * fh - xl * xl * xl * fl - 3.0 * integrate(2);
  mean_ = m1;
  const double var = m2 - m1 * m1;
  stddev_ = std::sqrt(var);
  skewness_ = (m3 - 3.0 * m1 * var - m1 * m1 * m1) / (var * stddev_);
}

double TwGueTable::cdf(double sigma) const {
  const double pos = (sigma - lo_) / step_;
  if (pos < 0.0) return 0.0;
  const auto last = static_cast<double>(values_.size() - 1);
  if (pos >= last) return 1.0;
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

}  // namespace kpz
