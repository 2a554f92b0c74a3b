#include "kpzlab/asep.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <limits>

#include "kpzlab/errors.hpp"

namespace kpz {

void AsepParams::validate() const {
  if (!(p >= 0.0 && q >= 0.0) || std::abs(p + q - 1.0) > 1e-15)
    throw ArgumentError("AsepParams: need p, q >= 0 and p + q = 1", {{"p", p}, {"q", q}});
}

long ExclusionState::height(long j) const {
  long h = height_at_origin();
  if (j > 0) {
    for (long i = 1; i <= j; ++i) h += occupied(i) ? -1 : 1;
  } else {
    for (long i = j + 1; i <= 0; ++i) h -= occupied(i) ? -1 : 1;
  }
  return h;
}

bool ExclusionState::consistent() const {
  const auto count = static_cast<std::size_t>(std::count(occupation.begin(), occupation.end(), 1));
  if (count != positions.size()) return false;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] < j_min || positions[i] > j_max || !occupied(positions[i])) return false;
    if (i > 0 && positions[i - 1] >= positions[i]) return false;
  }
  return true;
}

ExclusionState step_initial_state(long halfwidth) {
  if (halfwidth < 1) throw ArgumentError("step_initial_state: halfwidth must be >= 1");
  ExclusionState s;
  s.j_min = 1 - halfwidth;
  s.j_max = halfwidth;
  s.occupation.assign(static_cast<std::size_t>(2 * halfwidth), 0);
  for (long j = 1; j <= halfwidth; ++j) {
    s.occupation[static_cast<std::size_t>(j - s.j_min)] = 1;
    s.positions.push_back(j);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Ring generator

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

std::uint32_t ring_bit(int site) { return std::uint32_t{1} << site; }

// Calls fn(target, rate) for every admissible jump out of `config`.
template <class Fn>
void for_each_jump(int sites, std::uint32_t config, const AsepParams& params, Fn&& fn) {
  for (int j = 0; j < sites; ++j) {
    if (!(config & ring_bit(j))) continue;
    const int right = (j + 1) % sites;
    const int left = (j + sites - 1) % sites;
    if (params.p > 0.0 && !(config & ring_bit(right)))
      fn((config & ~ring_bit(j)) | ring_bit(right), params.p);
    if (params.q > 0.0 && !(config & ring_bit(left)))
      fn((config & ~ring_bit(j)) | ring_bit(left), params.q);
  }
}

}  // namespace

std::size_t RingGenerator::index_of(std::uint32_t config) const {
  const auto it = std::lower_bound(configs.begin(), configs.end(), config);
  if (it == configs.end() || *it != config)
    throw ArgumentError("RingGenerator: configuration not in sector", {{"config", config}});
  return static_cast<std::size_t>(it - configs.begin());
}

RingGenerator build_ring_generator(int sites, int particles, const AsepParams& params) {
  params.validate();
  if (sites < 2 || sites > 12)
    throw ArgumentError("build_ring_generator: ring size must be in [2, 12]", {{"L", sites}});
  if (particles < 0 || particles > sites)
    throw ArgumentError("build_ring_generator: particle number must be in [0, L]",
                        {{"k", particles}});
  if (binomial(sites, particles) > 1e6)
    throw ResourceError("build_ring_generator: sector too large",
                        {{"L", sites}, {"k", particles}});

  RingGenerator g;
  g.sites = sites;
  g.particles = particles;
  g.params = params;
  for (std::uint32_t c = 0; c < ring_bit(sites); ++c)
    if (std::popcount(c) == particles) g.configs.push_back(c);
  const auto dim = static_cast<Eigen::Index>(g.configs.size());
  g.matrix = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    double out = 0.0;
    for_each_jump(sites, g.configs[a], params, [&](std::uint32_t target, double rate) {
      g.matrix(a, static_cast<Eigen::Index>(g.index_of(target))) += rate;
      out += rate;
    });
    g.matrix(a, a) -= out;
  }
  return g;
}

SpectralSummary spectral_check(const RingGenerator& g) {
  if (g.matrix.rows() > 2000)
    throw ResourceError("spectral_check: sector dimension above 2000",
                        {{"dim", static_cast<double>(g.matrix.rows())}});
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(g.matrix, false);
  if (solver.info() != Eigen::Success) throw NumericError("spectral_check: eigensolver failed");
  SpectralSummary out;
  out.max_real_part = -std::numeric_limits<double>::infinity();
  for (const auto& ev : solver.eigenvalues()) {
    out.max_real_part = std::max(out.max_real_part, ev.real());
    out.max_abs_imag = std::max(out.max_abs_imag, std::abs(ev.imag()));
    out.real_parts.push_back(ev.real());
    if (std::abs(ev) < 1e-8) ++out.zero_multiplicity;
  }
  std::sort(out.real_parts.begin(), out.real_parts.end(), std::greater<>());
  return out;
}

std::uint32_t simulate_ring(int sites, std::uint32_t initial, const AsepParams& params,
                            double t_end, Rng& rng) {
  params.validate();
  std::uint32_t config = initial;
  double t = 0.0;
  std::uint32_t targets[64];
  double rates[64];
  for (;;) {
    int n = 0;
    double total = 0.0;
    for_each_jump(sites, config, params, [&](std::uint32_t target, double rate) {
      targets[n] = target;
      rates[n++] = rate;
      total += rate;
    });
    if (n == 0) return config;
    t += rng.exponential(total);
    if (t > t_end) return config;
    double u = rng.uniform() * total;
    int pick = 0;
    while (pick + 1 < n && u >= rates[pick]) u -= rates[pick++];
    config = targets[pick];
  }
}

// ---------------------------------------------------------------------------
// Sum tree

RateTree::RateTree(std::size_t leaves) : leaves_(leaves), offset_(std::bit_ceil(std::max<std::size_t>(leaves, 1))) {
  tree_.assign(2 * offset_, 0.0);
}

void RateTree::set(std::size_t leaf, double rate) {
  std::size_t i = offset_ + leaf;
  tree_[i] = rate;
  for (i >>= 1; i >= 1; i >>= 1) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

std::size_t RateTree::select(double target) const {
  std::size_t i = 1;
  while (i < offset_) {
    const double left = tree_[2 * i];
    if (target < left || tree_[2 * i + 1] <= 0.0) {
      i = 2 * i;
    } else {
      target -= left;
      i = 2 * i + 1;
    }
  }
  return i - offset_;
}

// ---------------------------------------------------------------------------
// Step initial condition on a window

long min_step_halfwidth(double t_end) {
  return static_cast<long>(std::ceil(t_end) + std::floor(10.0 * std::sqrt(t_end))) + 1;
}

namespace {

class StepSimulator {
 public:
  StepSimulator(const AsepParams& params, long halfwidth)
      : params_(params), state_(step_initial_state(halfwidth)), tree_(state_.sites() - 1) {
    owner_.assign(state_.sites(), -1);
    for (std::size_t i = 0; i < state_.positions.size(); ++i)
      owner_[index(state_.positions[i])] = static_cast<long>(i);
    for (std::size_t b = 0; b + 1 < state_.sites(); ++b) refresh(b);
  }

  double total_rate() const { return tree_.total(); }
  const ExclusionState& state() const { return state_; }
  ExclusionState& state() { return state_; }

  void fire(double target) {
    const std::size_t b = tree_.select(target);
    const std::size_t l = b, r = b + 1;
    const bool rightward = state_.occupation[l] != 0;
    assert(rightward != (state_.occupation[r] != 0));
    const std::size_t src = rightward ? l : r;
    const std::size_t dst = rightward ? r : l;
    if (dst == 0 || src + 1 == state_.sites()) {
      throw ContainmentError("simulate_step_ic: front reached the window boundary",
                             {{"time", state_.time},
                              {"site", static_cast<double>(state_.j_min + static_cast<long>(dst))}});
    }
    const long id = owner_[src];
    state_.occupation[src] = 0;
    state_.occupation[dst] = 1;
    owner_[src] = -1;
    owner_[dst] = id;
    state_.positions[static_cast<std::size_t>(id)] = state_.j_min + static_cast<long>(dst);
    if (static_cast<long>(b) == origin_bond()) state_.bond_counter += rightward ? -1 : 1;
    if (b > 0) refresh(b - 1);
    refresh(b);
    if (b + 2 < state_.sites()) refresh(b + 1);
#ifndef NDEBUG
    const auto k = static_cast<std::size_t>(id);
    assert(k == 0 || state_.positions[k - 1] < state_.positions[k]);
    assert(k + 1 == state_.positions.size() || state_.positions[k] < state_.positions[k + 1]);
#endif
  }

 private:
  std::size_t index(long j) const { return static_cast<std::size_t>(j - state_.j_min); }
  long origin_bond() const { return -state_.j_min; }  // bond (0, 1)

  void refresh(std::size_t b) {
    const bool l = state_.occupation[b] != 0;
    const bool r = state_.occupation[b + 1] != 0;
    tree_.set(b, l && !r ? params_.p : (!l && r ? params_.q : 0.0));
  }

  AsepParams params_;
  ExclusionState state_;
  RateTree tree_;
  std::vector<long> owner_;
};

}  // namespace

StepTrajectory simulate_step_ic(const AsepParams& params, long window_halfwidth, double t_end,
                                std::uint64_t seed, const StepRunOptions& options) {
  params.validate();
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw ArgumentError("simulate_step_ic: t_end must be >= 0", {{"t_end", t_end}});
  if (static_cast<double>(window_halfwidth) <= std::ceil(t_end) + 10.0 * std::sqrt(t_end))
    throw ArgumentError("simulate_step_ic: window too small for containment",
                        {{"halfwidth", static_cast<double>(window_halfwidth)},
                         {"required", static_cast<double>(min_step_halfwidth(t_end))}});
  for (const long tag : options.tags)
    if (tag < 1 || tag > window_halfwidth)
      throw ArgumentError("simulate_step_ic: tag outside window", {{"tag", static_cast<double>(tag)}});
  std::vector<double> times = options.observe_at;
  for (const double t : times)
    if (!(t > 0.0 && t < t_end))
      throw ArgumentError("simulate_step_ic: observation time outside (0, t_end)", {{"t", t}});
  std::sort(times.begin(), times.end());
  times.push_back(t_end);

  StepSimulator sim(params, window_halfwidth);
  Rng rng(seed, options.trajectory);
  StepTrajectory out;
  auto record = [&](double t) {
    StepObservation obs;
    obs.time = t;
    obs.current = sim.state().bond_counter;
    obs.height = 2 * obs.current;
    for (const long tag : options.tags)
      obs.tagged_positions.push_back(sim.state().positions[static_cast<std::size_t>(tag - 1)]);
    out.observations.push_back(std::move(obs));
  };

  std::size_t next = 0;
  double t = 0.0;
  while (next < times.size()) {
    const double rate = sim.total_rate();
    const double t_next =
        rate > 0.0 ? t + rng.exponential(rate) : std::numeric_limits<double>::infinity();
    // Events are a.s. distinct in continuous time.
    assert(t_next > t);
    while (next < times.size() && times[next] < t_next) record(times[next++]);
    if (next == times.size()) break;
    t = t_next;
    sim.state().time = t;
    sim.fire(rng.uniform() * rate);
    ++out.events;
  }
  sim.state().time = t_end;
  out.final_state = sim.state();
  return out;
}

WeakAsymmetryPreset weak_asymmetry_preset(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.25))
    throw ArgumentError("weak_asymmetry_preset: epsilon must lie in (0, 1/4]", {{"epsilon", epsilon}});
  const double root = std::sqrt(epsilon);
  return {{(1.0 - root) / 2.0, (1.0 + root) / 2.0}, 1.0 / (epsilon * epsilon)};
}

}  // namespace kpz
