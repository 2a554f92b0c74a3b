#pragma once

#include <cstdint>
#include <vector>

namespace kpz {

/// Nonnegative field Z_j on the sites j_min .. j_min + size - 1; zero
/// outside the window.
struct PolymerState {
  long j_min = 0;
  std::vector<double> z;
  double time = 0.0;
  /// Lattice spacing; 1 for the semi-discrete model.
  double dx = 1.0;

  long j_max() const { return j_min + static_cast<long>(z.size()) - 1; }
  double at(long j) const {
    return j < j_min || j > j_max() ? 0.0 : z[static_cast<std::size_t>(j - j_min)];
  }
  double mass() const;
};

struct SemiDiscreteOptions {
  /// false switches the Brownian forcing off (deterministic test hook).
  bool noise = true;
  std::uint64_t trajectory = 0;
};

/// dZ_j = (Z_{j-1} - Z_j) dt + Z_j db_j (Ito) with Z_j(0) = delta_{j0}, on
/// sites 0 .. window_size - 1. Sites j < 0 stay exactly zero.
///
/// Each step is a Strang splitting: half a step of the exact coupling flow
/// (a Poisson convolution), the exact geometric noise factor
/// exp(db - dt/2), another half step of coupling. The step is shortened so
/// that an integer number of steps lands on t_end.
PolymerState simulate_semidiscrete(double t_end, long window_size, double dt, std::uint64_t seed,
                                   const SemiDiscreteOptions& options = {});

/// Window size meeting the containment precondition for horizon t_end.
long min_semidiscrete_window(double t_end);

struct LatticeSheParams {
  double dx = 0.05;
  double dt = 0.0;  // 0 selects dx^2 / 4
  /// Sites -half_sites .. half_sites; 0 selects ceil((4 sqrt(t) + 2) / dx).
  long half_sites = 0;
  bool noise = true;

  /// Fills the defaults for a horizon t_end and checks dt <= dx^2 / 2.
  LatticeSheParams resolved(double t_end) const;
};

/// Explicit lattice scheme for dZ = (1/2) Z'' dt + Z dW (Ito) with
/// Z_i(0) = delta_{i0} / dx: a centered heat step followed by the per-site
/// factor exp(xi sqrt(dt/dx) - dt/(2 dx)), xi standard normal.
PolymerState simulate_lattice_she(const LatticeSheParams& params, double t_end,
                                  std::uint64_t seed, std::uint64_t trajectory = 0);

/// h = log Z at the given site.
double cole_hopf_height(const PolymerState& state, long site);

enum class SheSolver { semidiscrete, lattice };

struct MomentRequest {
  int n = 1;
  double t = 1.0;
  std::size_t trials = 1000;
  SheSolver solver = SheSolver::lattice;
  std::uint64_t seed = 0;
  /// Site whose Z is raised to the n-th power (semi-discrete only; the
  /// lattice solver uses the site at x = 0).
  long site = 0;
  double dx = 0.05;
  double dt = 0.0;  // 0 selects the solver default
  long window = 0;  // 0 selects the solver default
  unsigned threads = 1;
};

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  /// Set when some Z^n overflowed; mean and stderr are then meaningless.
  bool overflow = false;
  std::vector<double> samples;  // Z^n per trial, in trial order
};

/// Monte Carlo E[Z(site, t)^n] with jackknife standard error.
MomentEstimate moment_estimator(const MomentRequest& request);

/// Delete-one jackknife standard error of the sample mean.
double jackknife_stderr(const std::vector<double>& values);

}  // namespace kpz
