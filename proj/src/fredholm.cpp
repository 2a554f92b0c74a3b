#include "kpzlab/fredholm.hpp"

#include <cmath>
#include <sstream>

#include "kpzlab/errors.hpp"

namespace kpz {

KernelFunction::KernelFunction(Pointwise k, std::string name)
    : k_(std::move(k)), name_(std::move(name)) {
  if (!k_) throw ArgumentError("KernelFunction: empty pointwise evaluator");
}

KernelFunction& KernelFunction::with_domain(Interval domain) {
  domain_ = domain;
  return *this;
}

KernelFunction& KernelFunction::with_decay(DecayEnvelope envelope) {
  decay_ = std::move(envelope);
  return *this;
}

KernelFunction& KernelFunction::with_grid(Grid grid) {
  grid_ = std::move(grid);
  return *this;
}

Eigen::MatrixXd KernelFunction::evaluate_grid(std::span<const double> nodes) const {
  if (grid_) return grid_(nodes);
  const auto m = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = k_(nodes[i], nodes[j]);
  return out;
}

Eigen::MatrixXd nystrom_matrix(const KernelFunction& k, const QuadratureRule& rule) {
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  Eigen::MatrixXd a = k.evaluate_grid(nodes);
  const auto m = a.rows();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!std::isfinite(a(i, j))) {
        std::ostringstream msg;
        msg << "fredholm_det: kernel '" << k.name() << "' is not finite at (" << nodes[i] << ", "
            << nodes[j] << ")";
        throw NumericError(msg.str(), {{"x", nodes[i]}, {"y", nodes[j]}});
      }
    }
  }
  Eigen::VectorXd root_w(m);
  for (Eigen::Index i = 0; i < m; ++i) root_w[i] = std::sqrt(weights[i]);
  return root_w.asDiagonal() * a * root_w.asDiagonal();
}

double nystrom_det(const KernelFunction& k, const QuadratureRule& rule) {
  const Eigen::MatrixXd a = nystrom_matrix(k, rule);
  const auto m = a.rows();
  const Eigen::MatrixXd i_minus_a = Eigen::MatrixXd::Identity(m, m) - a;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(i_minus_a);
  const auto& packed = lu.matrixLU();
  double log_abs = 0.0;
  double sign = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double u = packed(i, i);
    if (u == 0.0) return 0.0;
    if (u < 0.0) sign = -sign;
    log_abs += std::log(std::abs(u));
  }
  return sign * std::exp(log_abs);
}

DeterminantResult fredholm_det(const KernelFunction& k, Interval interval, int m,
                               FredholmOptions options) {
  if (m < 2) throw ArgumentError("fredholm_det: need at least 2 nodes", {{"m", m}});
  if (!(interval.lower < interval.upper))
    throw ArgumentError("fredholm_det: empty interval",
                        {{"a", interval.lower}, {"b", interval.upper}});
  const int largest = options.doubling_check ? 2 * m : m;
  if (largest > options.max_nodes) {
    throw ResourceError("fredholm_det: node count exceeds memory budget",
                        {{"m", m}, {"max_nodes", options.max_nodes}});
  }

  DeterminantResult result;
  result.nodes_used = m;
  result.truncation = interval.upper;
  result.value = nystrom_det(k, gauss_legendre(m, interval.lower, interval.upper));
  if (options.doubling_check) {
    const double fine = nystrom_det(k, gauss_legendre(2 * m, interval.lower, interval.upper));
    result.doubling_gap = std::abs(result.value - fine);
  }
  if (!std::isfinite(result.value))
    throw NumericError("fredholm_det: determinant is not finite", {{"m", m}});
  return result;
}

Interval truncate_domain(const KernelFunction& k, double lower, double tail_tol) {
  if (!(tail_tol > 0.0 && tail_tol <= 1e-6))
    throw ArgumentError("truncate_domain: tail_tol must lie in (0, 1e-6]", {{"tail_tol", tail_tol}});
  if (!k.decay() || !k.decay()->bound)
    throw ConfigurationError("truncate_domain: kernel '" + k.name() + "' has no decay envelope");
  const auto& env = *k.decay();
  const double origin = env.translation_covariant ? lower : 0.0;
  auto below = [&](double x) { return env.bound(x - origin) < tail_tol; };

  // Unit steps until the envelope is below tolerance, then bisect the last
  // step down to 1/64.
  constexpr double kMaxReach = 1e4;
  double hi = lower + 1.0;
  while (!below(hi)) {
    hi += 1.0;
    if (hi > lower + kMaxReach) {
      throw ConfigurationError("truncate_domain: envelope of '" + k.name() +
                                   "' does not decay below tail_tol",
                               {{"lower", lower}, {"tail_tol", tail_tol}});
    }
  }
  double lo = hi - 1.0;
  if (lo < lower + 1.0) return {lower, hi};
  while (hi - lo > 1.0 / 64.0) {
    const double mid = 0.5 * (lo + hi);
    if (below(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {lower, hi};
}

}  // namespace kpz
