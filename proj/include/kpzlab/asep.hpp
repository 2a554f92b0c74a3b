#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "kpzlab/rng.hpp"

namespace kpz {

/// Jump rates: right (j -> j+1) with p, left (j -> j-1) with q, p + q = 1.
struct AsepParams {
  double p = 0.0;
  double q = 1.0;

  /// Totally asymmetric case q = 1: particles drift left into the empty
  /// half of the step configuration.
  static AsepParams tasep() { return {0.0, 1.0}; }
  static AsepParams from_p(double p) { return {p, 1.0 - p}; }
  void validate() const;
};

/// Exclusion configuration on the window [j_min, j_max].
///
/// Particles are labelled from the left in their initial order; since
/// nearest-neighbour exclusion jumps cannot overtake, particle i stays the
/// i-th from the left for the whole trajectory.
struct ExclusionState {
  long j_min = 0;
  long j_max = 0;
  std::vector<std::uint8_t> occupation;  // index j - j_min
  double time = 0.0;
  /// Net crossings of the bond (0, 1): jumps 1 -> 0 minus jumps 0 -> 1.
  long bond_counter = 0;
  std::vector<long> positions;  // ascending

  bool occupied(long j) const { return occupation[static_cast<std::size_t>(j - j_min)] != 0; }
  std::size_t sites() const { return occupation.size(); }
  /// h(0, t) = 2 N(t).
  long height_at_origin() const { return 2 * bond_counter; }
  /// Height profile relative to the origin: h(j+1) - h(j) = 1 - 2 eta(j+1).
  long height(long j) const;
  /// Checks exclusion, particle count and ordering against the positions list.
  bool consistent() const;
};

/// Step configuration: sites <= 0 empty, sites >= 1 occupied, on
/// [1 - halfwidth, halfwidth].
ExclusionState step_initial_state(long halfwidth);

/// Dense configuration-basis rate matrix of ASEP on a ring of L sites with
/// k particles. Configurations are bitmasks (bit j = site j occupied) in
/// ascending numeric order.
struct RingGenerator {
  int sites = 0;
  int particles = 0;
  AsepParams params;
  std::vector<std::uint32_t> configs;
  Eigen::MatrixXd matrix;  // matrix(a, b) = rate a -> b; rows sum to zero

  std::size_t index_of(std::uint32_t config) const;
};

RingGenerator build_ring_generator(int sites, int particles, const AsepParams& params);

struct SpectralSummary {
  double max_real_part = 0.0;
  int zero_multiplicity = 0;
  std::vector<double> real_parts;  // sorted descending
  double max_abs_imag = 0.0;
};

SpectralSummary spectral_check(const RingGenerator& g);

/// One Gillespie trajectory on the ring from `initial` up to t_end; returns
/// the final configuration.
std::uint32_t simulate_ring(int sites, std::uint32_t initial, const AsepParams& params,
                            double t_end, Rng& rng);

/// Minimal sum tree over nonnegative leaf rates: O(log n) update and
/// selection. Internal nodes are recomputed from their children on every
/// update, so sums carry no accumulated drift.
class RateTree {
 public:
  explicit RateTree(std::size_t leaves);

  void set(std::size_t leaf, double rate);
  double rate(std::size_t leaf) const { return tree_[offset_ + leaf]; }
  double total() const { return tree_[1]; }
  /// Leaf whose cumulative-rate interval contains target in [0, total()).
  std::size_t select(double target) const;
  std::size_t size() const { return leaves_; }

 private:
  std::size_t leaves_;
  std::size_t offset_;
  std::vector<double> tree_;
};

struct StepObservation {
  double time = 0.0;
  long current = 0;  // N(t)
  long height = 0;   // 2 N(t)
  std::vector<long> tagged_positions;
};

struct StepTrajectory {
  ExclusionState final_state;
  /// One entry per requested observation time (t_end included last).
  std::vector<StepObservation> observations;
  std::uint64_t events = 0;
};

struct StepRunOptions {
  /// Extra observation times in (0, t_end); t_end is always observed.
  std::vector<double> observe_at;
  /// Particle labels j >= 1 (initially at site j) whose positions x_j(t)
  /// are recorded.
  std::vector<long> tags;
  std::uint64_t trajectory = 0;
};

/// Smallest admissible window half-width for a horizon t_end.
long min_step_halfwidth(double t_end);

/// Continuous-time simulation from the step configuration. Throws
/// ContainmentError if a particle reaches the left window edge or a hole
/// reaches the right one, because past that point the window no longer
/// reproduces the infinite system exactly.
StepTrajectory simulate_step_ic(const AsepParams& params, long window_halfwidth, double t_end,
                                std::uint64_t seed, const StepRunOptions& options = {});

struct WeakAsymmetryPreset {
  AsepParams params;
  double time_scale = 1.0;
};

/// q - p = sqrt(eps), time scale eps^{-2}; 0 < eps <= 1/4.
WeakAsymmetryPreset weak_asymmetry_preset(double epsilon);

}  // namespace kpz
