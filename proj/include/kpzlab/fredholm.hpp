#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "kpzlab/special_fn.hpp"

namespace kpz {

struct Interval {
  double lower;
  double upper;
};

/// Upper bound on |k(x, x)|, used to choose where to cut a semi-infinite
/// domain. The bound must be nonincreasing in its argument. For a
/// translation-covariant envelope the argument is the distance from the
/// lower end of the domain; otherwise it is the absolute position.
struct DecayEnvelope {
  std::function<double(double)> bound;
  bool translation_covariant = false;
};

/// Real kernel k(x, y) of an integral operator.
///
/// Besides pointwise evaluation a kernel may supply a grid evaluator that
/// fills the whole matrix k(x_i, x_j) at once; kernels defined by an inner
/// integral use this to share work between matrix entries.
class KernelFunction {
 public:
  using Pointwise = std::function<double(double, double)>;
  using Grid = std::function<Eigen::MatrixXd(std::span<const double>)>;

  explicit KernelFunction(Pointwise k, std::string name = "kernel");

  KernelFunction& with_domain(Interval domain);
  KernelFunction& with_decay(DecayEnvelope envelope);
  KernelFunction& with_grid(Grid grid);

  double operator()(double x, double y) const { return k_(x, y); }
  Eigen::MatrixXd evaluate_grid(std::span<const double> nodes) const;

  const std::string& name() const noexcept { return name_; }
  const std::optional<Interval>& domain() const noexcept { return domain_; }
  const std::optional<DecayEnvelope>& decay() const noexcept { return decay_; }

 private:
  Pointwise k_;
  Grid grid_;
  std::string name_;
  std::optional<Interval> domain_;
  std::optional<DecayEnvelope> decay_;
};

struct DeterminantResult {
  double value = 1.0;
  int nodes_used = 0;
  /// Upper end of the (possibly truncated) integration interval.
  double truncation = 0.0;
  /// |det_m - det_2m|; zero when the doubling run was skipped.
  double doubling_gap = 0.0;
};

struct FredholmDefaults {
  static constexpr int nodes = 40;
  static constexpr double tail_tol = 1e-16;
  /// Largest node count (including the doubling run) accepted.
  static constexpr int max_nodes = 4096;
};

struct FredholmOptions {
  bool doubling_check = true;
  int max_nodes = FredholmDefaults::max_nodes;
};

/// det(I - W^{1/2} K W^{1/2}) for the m-node Gauss-Legendre discretization
/// of k on [a, b]. Unless disabled, the same determinant is recomputed with
/// 2m nodes and the difference reported as doubling_gap.
DeterminantResult fredholm_det(const KernelFunction& k, Interval interval,
                               int m = FredholmDefaults::nodes, FredholmOptions options = {});

/// Single-resolution Nystrom determinant on a given rule.
double nystrom_det(const KernelFunction& k, const QuadratureRule& rule);

/// Symmetrized Nystrom matrix W^{1/2} K W^{1/2} on a given rule.
Eigen::MatrixXd nystrom_matrix(const KernelFunction& k, const QuadratureRule& rule);

/// [lower, b] with b the first point (resolution 1/64) where the kernel's
/// decay envelope drops below tail_tol; b >= lower + 1.
Interval truncate_domain(const KernelFunction& k, double lower,
                         double tail_tol = FredholmDefaults::tail_tol);

}  // namespace kpz
