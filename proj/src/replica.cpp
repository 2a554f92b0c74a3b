#include "kpzlab/replica.hpp"

#include <algorithm>
#include <cmath>

#include "kpzlab/errors.hpp"

namespace kpz {

GridWaveFunction::GridWaveFunction(int n, double half_width, double dx) : n_(n), dx_(dx) {
  if (n < 1 || n > 3) throw ArgumentError("GridWaveFunction: n must be 1, 2 or 3", {{"n", n}});
  if (!(dx > 0.0) || !(half_width >= dx))
    throw ArgumentError("GridWaveFunction: need 0 < dx <= half_width", {{"dx", dx}, {"L", half_width}});
  axis_ = 2 * static_cast<std::size_t>(std::llround(half_width / dx)) + 1;
  const double points = std::pow(static_cast<double>(axis_), n);
  if (points > 2e7)
    throw ResourceError("GridWaveFunction: grid exceeds 2e7 points", {{"points", points}});
  values_.assign(static_cast<std::size_t>(points), 0.0);
}

std::size_t GridWaveFunction::flat(std::size_t i, std::size_t j, std::size_t k) const {
  const std::size_t d1 = n_ >= 2 ? axis_ : 1;
  const std::size_t d2 = n_ >= 3 ? axis_ : 1;
  return (i * d1 + j) * d2 + k;
}

double& GridWaveFunction::at(std::size_t i, std::size_t j, std::size_t k) { return values_[flat(i, j, k)]; }
double GridWaveFunction::at(std::size_t i, std::size_t j, std::size_t k) const {
  return values_[flat(i, j, k)];
}

double GridWaveFunction::at_origin() const {
  const std::size_t c = origin_index();
  return at(c, n_ >= 2 ? c : 0, n_ >= 3 ? c : 0);
}

double GridWaveFunction::symmetry_defect() const {
  if (n_ == 1) return 0.0;
  double defect = 0.0;
  const std::size_t a = axis_;
  if (n_ == 2) {
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = i + 1; j < a; ++j) defect = std::max(defect, std::abs(at(i, j) - at(j, i)));
    return defect;
  }
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < a; ++j)
      for (std::size_t k = 0; k < a; ++k) {
        const double v = at(i, j, k);
        defect = std::max({defect, std::abs(v - at(j, i, k)), std::abs(v - at(i, k, j)),
                           std::abs(v - at(k, j, i))});
      }
  return defect;
}

double GridWaveFunction::boundary_fraction() const {
  double total = 0.0, edge = 0.0;
  const std::size_t last = axis_ - 1;
  const std::size_t d1 = n_ >= 2 ? axis_ : 1;
  const std::size_t d2 = n_ >= 3 ? axis_ : 1;
  for (std::size_t i = 0; i < axis_; ++i)
    for (std::size_t j = 0; j < d1; ++j)
      for (std::size_t k = 0; k < d2; ++k) {
        const double v = std::abs(at(i, j, k));
        total += v;
        const bool on_edge = i == 0 || i == last || (n_ >= 2 && (j == 0 || j == last)) ||
                             (n_ >= 3 && (k == 0 || k == last));
        if (on_edge) edge += v;
      }
  return total > 0.0 ? edge / total : 0.0;
}

double min_replica_half_width(double t) { return 4.0 * std::sqrt(t) + 2.0; }
double default_replica_half_width(double t) { return 6.0 * std::sqrt(t) + 2.0; }

namespace {

// psi <- (1 + r Delta) psi along one axis, zero outside the grid.
void kinetic_sweep(std::vector<double>& psi, std::size_t axis, std::size_t stride, double r) {
  const std::size_t total = psi.size();
  const std::size_t block = stride * axis;
  for (std::size_t outer = 0; outer < total; outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      double* line = psi.data() + outer + inner;
      double prev = 0.0;
      for (std::size_t i = 0; i < axis; ++i) {
        const double here = line[i * stride];
        const double next = i + 1 < axis ? line[(i + 1) * stride] : 0.0;
        line[i * stride] = here + r * (prev - 2.0 * here + next);
        prev = here;
      }
    }
  }
}

// Multiplies psi by `factor` once per coinciding pair of coordinates.
void pair_potential(GridWaveFunction& psi, double factor) {
  const int n = psi.particles();
  const std::size_t a = psi.points_per_axis();
  if (n == 2) {
    for (std::size_t i = 0; i < a; ++i) psi.at(i, i) *= factor;
  } else if (n == 3) {
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t k = 0; k < a; ++k) {
        psi.at(i, i, k) *= factor;  // x1 = x2
        psi.at(k, i, i) *= factor;  // x2 = x3
        psi.at(i, k, i) *= factor;  // x1 = x3
      }
  }
}

}  // namespace

double propagate(int n, double t, double dx, double dtau, double half_width) {
  if (n < 1 || n > 3) throw ArgumentError("propagate: n must be 1, 2 or 3", {{"n", n}});
  if (!(t > 0.0)) throw ArgumentError("propagate: t must be positive", {{"t", t}});
  if (!(dx > 0.0)) throw ArgumentError("propagate: dx must be positive", {{"dx", dx}});
  if (dtau == 0.0) dtau = dx * dx / ReplicaDefaults::dtau_divisor;
  if (!(dtau > 0.0) || dtau > dx * dx / 4.0)
    throw ArgumentError("propagate: need 0 < dtau <= dx^2 / 4", {{"dtau", dtau}, {"dx", dx}});
  if (half_width == 0.0) half_width = default_replica_half_width(t);
  if (half_width < min_replica_half_width(t))
    throw ArgumentError("propagate: half width below 4 sqrt(t) + 2", {{"L", half_width}, {"t", t}});

  GridWaveFunction psi(n, half_width, dx);
  const std::size_t c = psi.origin_index();
  psi.at(c, n >= 2 ? c : 0, n >= 3 ? c : 0) = std::pow(1.0 / dx, n);

  const auto steps = static_cast<long>(std::ceil(t / dtau - 1e-9));
  const double h = t / static_cast<double>(steps);
  const double r = h / (2.0 * dx * dx);
  // V = -(1/dx) per coinciding pair, so exp(-h V / 2) = exp(h / (2 dx)).
  const double half_factor = std::exp(h / (2.0 * dx));
  const double full_factor = half_factor * half_factor;
  const std::size_t a = psi.points_per_axis();
  std::size_t strides[3] = {1, 1, 1};
  for (int d = n - 2; d >= 0; --d) strides[d] = strides[d + 1] * a;

  pair_potential(psi, half_factor);
  for (long step = 0; step < steps; ++step) {
    for (int d = 0; d < n; ++d) kinetic_sweep(psi.values(), a, strides[d], r);
    pair_potential(psi, step + 1 == steps ? half_factor : full_factor);
  }

  const double value = psi.at_origin();
  if (psi.boundary_fraction() > ReplicaDefaults::boundary_tol)
    throw ContainmentError("propagate: wave function reached the grid boundary",
                           {{"boundary_fraction", psi.boundary_fraction()}, {"L", half_width}});
  const double peak = *std::max_element(psi.values().begin(), psi.values().end());
  if (psi.symmetry_defect() > ReplicaDefaults::symmetry_tol * peak)
    throw NumericError("propagate: bosonic symmetry lost", {{"defect", psi.symmetry_defect()}});
  if (!std::isfinite(value)) throw NumericError("propagate: value not finite");
  return value;
}

RichardsonEstimate propagate_richardson(int n, double t, double dx, double half_width) {
  RichardsonEstimate out;
  out.coarse = propagate(n, t, dx, 0.0, half_width);
  out.fine = propagate(n, t, dx / 2.0, 0.0, half_width);
  out.extrapolated = 2.0 * out.fine - out.coarse;
  out.error_estimate = std::abs(out.fine - out.coarse);
  return out;
}

std::vector<std::pair<int, double>> moment_growth_probe(double t, double dx) {
  if (!(t > 0.0 && t <= 1.0)) throw ArgumentError("moment_growth_probe: need 0 < t <= 1", {{"t", t}});
  std::vector<std::pair<int, double>> out;
  for (int n = 1; n <= 3; ++n) out.emplace_back(n, propagate(n, t, dx));
  return out;
}

}  // namespace kpz
