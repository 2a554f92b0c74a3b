#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace kpz {

/// Wave function of n <= 3 bosons on the grid [-L, L]^n with spacing dx.
class GridWaveFunction {
 public:
  GridWaveFunction(int n, double half_width, double dx);

  int particles() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  std::size_t points_per_axis() const noexcept { return axis_; }
  std::size_t origin_index() const noexcept { return axis_ / 2; }
  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double& at(std::size_t i, std::size_t j = 0, std::size_t k = 0);
  double at(std::size_t i, std::size_t j = 0, std::size_t k = 0) const;
  double at_origin() const;

  /// Largest |psi(x) - psi(pi x)| over coordinate permutations pi.
  double symmetry_defect() const;
  /// Mass on the outermost grid layer divided by total mass.
  double boundary_fraction() const;

 private:
  std::size_t flat(std::size_t i, std::size_t j, std::size_t k) const;

  int n_;
  double dx_;
  std::size_t axis_;
  std::vector<double> values_;
};

struct ReplicaDefaults {
  /// dtau = dx^2 / dtau_divisor unless given.
  static constexpr double dtau_divisor = 8.0;
  static constexpr double boundary_tol = 1e-10;
  static constexpr double symmetry_tol = 1e-10;
};

/// Smallest admissible half-width 4 sqrt(t) + 2.
double min_replica_half_width(double t);
/// Half-width used when none is given: 6 sqrt(t) + 2. At the minimum the
/// free Gaussian alone leaves ~1e-10 of the mass on the edge layer, which
/// already trips the containment check.
double default_replica_half_width(double t);

/// <0| exp(-t H_n) |0> for the attractive delta Bose gas
/// H_n = -(1/2) sum_j d^2/dx_j^2 - (1/2) sum_{i != j} delta(x_i - x_j),
/// by symmetric Trotter steps on the grid. |0> is the grid delta with mass
/// 1/dx per coordinate at the origin; the delta interaction is the on-site
/// well -(1/dx) per coinciding pair.
double propagate(int n, double t, double dx, double dtau = 0.0, double half_width = 0.0);

/// propagate at dx and dx/2 with first-order Richardson extrapolation.
struct RichardsonEstimate {
  double coarse = 0.0;          // at dx
  double fine = 0.0;            // at dx / 2
  double extrapolated = 0.0;    // 2 fine - coarse
  double error_estimate = 0.0;  // |fine - coarse|, bounds |fine - limit| to first order
};
RichardsonEstimate propagate_richardson(int n, double t, double dx, double half_width = 0.0);

/// propagate for n = 1, 2, 3 at one time t <= 1.
std::vector<std::pair<int, double>> moment_growth_probe(double t, double dx = 0.1);

}  // namespace kpz
