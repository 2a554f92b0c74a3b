#include "kpzlab/she.hpp"

#include <cmath>
#include <numeric>

#include "kpzlab/errors.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/rng.hpp"

namespace kpz {

double PolymerState::mass() const {
  return dx * std::accumulate(z.begin(), z.end(), 0.0);
}

// ---------------------------------------------------------------------------
// Semi-discrete model

namespace {

// e^{-tau} tau^k / k!, truncated once terms drop below 1e-20.
std::vector<double> poisson_weights(double tau) {
  std::vector<double> w{std::exp(-tau)};
  for (int k = 1; k < 64; ++k) {
    const double next = w.back() * tau / k;
    if (next < 1e-20) break;
    w.push_back(next);
  }
  return w;
}

// Exact flow of dZ_j/dt = Z_{j-1} - Z_j over the time the weights belong to.
// Returns the mass pushed past the last site.
double couple(std::vector<double>& z, const std::vector<double>& w) {
  const std::size_t size = z.size();
  const std::size_t taps = w.size();
  double leaked = 0.0;
  for (std::size_t j = size; j-- > 0;) {
    // Mass of site j that lands beyond the window.
    const std::size_t room = size - 1 - j;
    if (room + 1 < taps) {
      double tail = 0.0;
      for (std::size_t k = room + 1; k < taps; ++k) tail += w[k];
      leaked += tail * z[j];
    }
    double acc = 0.0;
    const std::size_t reach = std::min(j + 1, taps);
    for (std::size_t k = 0; k < reach; ++k) acc += w[k] * z[j - k];
    z[j] = acc;
  }
  return leaked;
}

}  // namespace

long min_semidiscrete_window(double t_end) {
  return static_cast<long>(std::floor(t_end + 10.0 * std::sqrt(t_end))) + 1;
}

PolymerState simulate_semidiscrete(double t_end, long window_size, double dt, std::uint64_t seed,
                                   const SemiDiscreteOptions& options) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw ArgumentError("simulate_semidiscrete: t_end must be >= 0", {{"t_end", t_end}});
  if (!(dt > 0.0 && dt <= 0.01))
    throw ArgumentError("simulate_semidiscrete: dt must lie in (0, 0.01]", {{"dt", dt}});
  if (!(static_cast<double>(window_size) > t_end + 10.0 * std::sqrt(t_end)))
    throw ArgumentError("simulate_semidiscrete: window too small for mass containment",
                        {{"window", static_cast<double>(window_size)}, {"t_end", t_end}});

  PolymerState state;
  state.z.assign(static_cast<std::size_t>(window_size), 0.0);
  state.z[0] = 1.0;
  if (t_end == 0.0) return state;

  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);
  const auto half = poisson_weights(0.5 * h);
  const auto full = poisson_weights(h);
  const double sigma = std::sqrt(h);
  Rng rng(seed, options.trajectory);

  double leaked = couple(state.z, half);
  for (long step = 0; step < steps; ++step) {
    if (options.noise)
      for (double& zj : state.z) zj *= std::exp(sigma * rng.normal() - 0.5 * h);
    leaked += couple(state.z, step + 1 == steps ? half : full);
  }
  state.time = t_end;
  const double total = state.mass();
  if (leaked > 1e-12 * (total + leaked)) {
    throw ContainmentError("simulate_semidiscrete: mass escaped the window",
                           {{"leaked", leaked}, {"mass", total}, {"window", static_cast<double>(window_size)}});
  }
  return state;
}

// ---------------------------------------------------------------------------
// Lattice SHE

LatticeSheParams LatticeSheParams::resolved(double t_end) const {
  LatticeSheParams out = *this;
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ArgumentError("lattice SHE: dx must be positive", {{"dx", dx}});
  if (out.dt == 0.0) out.dt = dx * dx / 4.0;
  if (!(out.dt > 0.0) || out.dt > dx * dx / 2.0)
    throw ArgumentError("lattice SHE: stability requires 0 < dt <= dx^2 / 2", {{"dt", out.dt}, {"dx", dx}});
  if (out.half_sites == 0)
    out.half_sites = static_cast<long>(std::ceil((4.0 * std::sqrt(std::max(t_end, 0.0)) + 2.0) / dx));
  if (out.half_sites < 1) throw ArgumentError("lattice SHE: half_sites must be >= 1");
  return out;
}

PolymerState simulate_lattice_she(const LatticeSheParams& raw, double t_end, std::uint64_t seed,
                                  std::uint64_t trajectory) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw ArgumentError("simulate_lattice_she: t_end must be >= 0", {{"t_end", t_end}});
  const LatticeSheParams params = raw.resolved(t_end);
  const long n = params.half_sites;
  const double dx = params.dx;

  PolymerState state;
  state.dx = dx;
  state.j_min = -n;
  state.z.assign(static_cast<std::size_t>(2 * n + 1), 0.0);
  state.z[static_cast<std::size_t>(n)] = 1.0 / dx;
  if (t_end == 0.0) return state;

  const auto steps = static_cast<long>(std::ceil(t_end / params.dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);
  const double r = h / (2.0 * dx * dx);
  const double amp = std::sqrt(h / dx);
  const double drift = h / (2.0 * dx);
  Rng rng(seed, trajectory);

  std::vector<double>& z = state.z;
  const std::size_t size = z.size();
  for (long step = 0; step < steps; ++step) {
    double prev = 0.0;  // old z[i-1]
    for (std::size_t i = 0; i < size; ++i) {
      const double here = z[i];
      const double next = i + 1 < size ? z[i + 1] : 0.0;
      z[i] = here + r * (prev - 2.0 * here + next);
      prev = here;
    }
    if (params.noise)
      for (double& zi : z) zi *= std::exp(amp * rng.normal() - drift);
  }
  state.time = t_end;

  // Two outermost sites on each side, relative to the total mass.
  const double edge = dx * (z.front() + z.back() + z[1] + z[size - 2]);
  const double total = state.mass();
  if (edge > 1e-6 * total) {
    throw ContainmentError("simulate_lattice_she: field reached the window boundary",
                           {{"edge_mass", edge}, {"mass", total}});
  }
  return state;
}

double cole_hopf_height(const PolymerState& state, long site) {
  const double z = state.at(site);
  if (!(z > 0.0))
    throw DomainError("cole_hopf_height: Z vanishes at this site, height undefined",
                      {{"site", static_cast<double>(site)}});
  return std::log(z);
}

// ---------------------------------------------------------------------------
// Moments

double jackknife_stderr(const std::vector<double>& values) {
  const auto n = values.size();
  if (n < 2) return 0.0;
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  const double nn = static_cast<double>(n);
  // Leave-one-out means theta_i = (sum - x_i) / (n - 1); their mean is sum / n.
  const double mean_loo = sum / nn;
  double ss = 0.0;
  for (const double x : values) {
    const double d = (sum - x) / (nn - 1.0) - mean_loo;
    ss += d * d;
  }
  return std::sqrt((nn - 1.0) / nn * ss);
}

MomentEstimate moment_estimator(const MomentRequest& req) {
  if (req.n < 1 || req.n > 3) throw ArgumentError("moment_estimator: n must be 1, 2 or 3", {{"n", req.n}});
  if (req.trials < 1000)
    throw ArgumentError("moment_estimator: need at least 1000 trials",
                        {{"trials", static_cast<double>(req.trials)}});
  if (!(req.t > 0.0)) throw ArgumentError("moment_estimator: t must be positive", {{"t", req.t}});

  MomentEstimate out;
  out.trials = req.trials;
  out.samples.assign(req.trials, 0.0);
  parallel_for(req.trials, req.threads, [&](std::size_t i) {
    double z = 0.0;
    if (req.solver == SheSolver::semidiscrete) {
      const long window = req.window > 0 ? req.window : min_semidiscrete_window(req.t) + 8;
      SemiDiscreteOptions opt;
      opt.trajectory = i;
      const double dt = req.dt > 0.0 ? req.dt : 1e-3;
      z = simulate_semidiscrete(req.t, window, dt, req.seed, opt).at(req.site);
    } else {
      LatticeSheParams params;
      params.dx = req.dx;
      params.dt = req.dt;
      params.half_sites = req.window;
      z = simulate_lattice_she(params, req.t, req.seed, i).at(0);
    }
    out.samples[i] = std::pow(z, req.n);
  });
  for (const double v : out.samples)
    if (!std::isfinite(v)) out.overflow = true;
  if (out.overflow) return out;
  out.mean = std::accumulate(out.samples.begin(), out.samples.end(), 0.0) /
             static_cast<double>(out.trials);
  out.std_error = jackknife_stderr(out.samples);
  return out;
}

}  // namespace kpz
