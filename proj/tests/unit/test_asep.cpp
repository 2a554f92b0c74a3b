#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <cmath>
#include <numeric>

#include "kpzlab/asep.hpp"
#include "kpzlab/errors.hpp"
#include "kpzlab/stats.hpp"

using namespace kpz;

TEST_CASE("AsepParams") {
  CHECK_NOTHROW(AsepParams::tasep().validate());
  CHECK_NOTHROW(AsepParams::from_p(0.3).validate());
  CHECK_THROWS_AS(AsepParams({0.5, 0.6}).validate(), ArgumentError);
  CHECK_THROWS_AS(AsepParams({-0.1, 1.1}).validate(), ArgumentError);
}

TEST_CASE("L = 3, k = 1 TASEP is a directed three-cycle") {
  const auto g = build_ring_generator(3, 1, AsepParams::from_p(1.0));
  REQUIRE(g.configs.size() == 3);
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(g.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) == -1.0);
    int exits = 0;
    for (std::size_t b = 0; b < 3; ++b)
      if (a != b && g.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) != 0.0) {
        ++exits;
        // A rightward jump on the ring rotates the single particle's bit left.
        const std::uint32_t from = g.configs[a];
        const std::uint32_t to = ((from << 1) | (from >> 2)) & 0b111u;
        CHECK(g.configs[b] == to);
      }
    CHECK(exits == 1);
  }
}

TEST_CASE("generator rows, signs and uniform invariance") {
  for (const auto& [l, k, p] : {std::tuple{8, 4, 0.7}, {6, 3, 0.6}, {5, 2, 0.0}, {7, 3, 0.5}}) {
    const auto g = build_ring_generator(l, k, AsepParams::from_p(p));
    const auto n = g.matrix.rows();
    CHECK(static_cast<std::size_t>(n) == g.configs.size());
    for (Eigen::Index a = 0; a < n; ++a) {
      CHECK(std::abs(g.matrix.row(a).sum()) < 1e-13);
      for (Eigen::Index b = 0; b < n; ++b)
        if (a != b) CHECK(g.matrix(a, b) >= 0.0);
    }
    const Eigen::RowVectorXd u = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
    CHECK((u * g.matrix).cwiseAbs().maxCoeff() < 1e-12);
    for (const auto c : g.configs) CHECK(std::popcount(c) == k);
    CHECK(std::is_sorted(g.configs.begin(), g.configs.end()));
  }
}

TEST_CASE("symmetric exclusion has a symmetric generator") {
  const auto g = build_ring_generator(7, 3, AsepParams::from_p(0.5));
  CHECK((g.matrix - g.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectral check") {
  const auto a = spectral_check(build_ring_generator(4, 2, AsepParams::from_p(0.8)));
  CHECK(std::abs(a.max_real_part) < 1e-10);
  CHECK(a.zero_multiplicity == 1);

  const auto frozen = build_ring_generator(3, 3, AsepParams::from_p(0.5));
  CHECK(frozen.matrix.size() == 1);
  CHECK(frozen.matrix(0, 0) == 0.0);
  const auto f = spectral_check(frozen);
  CHECK(f.zero_multiplicity == 1);
  CHECK(f.max_real_part == 0.0);

  const auto sym = spectral_check(build_ring_generator(6, 3, AsepParams::from_p(0.5)));
  CHECK(sym.max_abs_imag < 1e-10);
  for (const double r : sym.real_parts) CHECK(r <= 1e-10);
  CHECK(sym.zero_multiplicity == 1);
}

TEST_CASE("ring generator errors") {
  CHECK_THROWS_AS(build_ring_generator(1, 1, AsepParams::tasep()), ArgumentError);
  CHECK_THROWS_AS(build_ring_generator(13, 6, AsepParams::tasep()), ArgumentError);
  CHECK_THROWS_AS(build_ring_generator(6, 7, AsepParams::tasep()), ArgumentError);
  // C(12, 6) = 924 fits; the spectral limit is 2000.
  CHECK_NOTHROW(build_ring_generator(12, 6, AsepParams::tasep()));
}

TEST_CASE("ring simulator matches the matrix exponential (reduced size)") {
  const AsepParams params = AsepParams::from_p(0.7);
  const auto g = build_ring_generator(5, 2, params);
  const std::uint32_t start = 0b00011;
  const double t = 1.5;
  const Eigen::MatrixXd semigroup = (t * g.matrix).exp();
  const Eigen::RowVectorXd exact = semigroup.row(static_cast<Eigen::Index>(g.index_of(start)));
  const int trials = 20000;
  std::vector<int> counts(g.configs.size(), 0);
  for (int i = 0; i < trials; ++i) {
    Rng rng(99, static_cast<std::uint64_t>(i));
    ++counts[g.index_of(simulate_ring(5, start, params, t, rng))];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double pc = exact(static_cast<Eigen::Index>(c));
    const double sigma = std::sqrt(pc * (1.0 - pc) / trials);
    CAPTURE(c);
    CHECK(std::abs(counts[c] / static_cast<double>(trials) - pc) < 4.0 * sigma + 1e-12);
  }
}

TEST_CASE("rate tree") {
  RateTree tree(5);
  tree.set(0, 1.0);
  tree.set(2, 2.0);
  tree.set(4, 0.5);
  CHECK(tree.total() == 3.5);
  CHECK(tree.select(0.5) == 0);
  CHECK(tree.select(1.5) == 2);
  CHECK(tree.select(3.2) == 4);
  tree.set(2, 0.0);
  CHECK(tree.total() == 1.5);
  CHECK(tree.select(1.2) == 4);
}

TEST_CASE("step initial state and height profile") {
  const auto s = step_initial_state(5);
  CHECK(s.j_min == -4);
  CHECK(s.j_max == 5);
  for (long j = -4; j <= 0; ++j) CHECK_FALSE(s.occupied(j));
  for (long j = 1; j <= 5; ++j) CHECK(s.occupied(j));
  CHECK(s.positions.size() == 5);
  CHECK(s.consistent());
  CHECK(s.height(0) == 0);
  CHECK(s.height(3) == -3);
  CHECK(s.height(-2) == -2);
}

TEST_CASE("t_end = 0 returns the step configuration") {
  const auto run = simulate_step_ic(AsepParams::tasep(), 20, 0.0, 5);
  CHECK(run.events == 0);
  CHECK(run.final_state.bond_counter == 0);
  CHECK(run.final_state.consistent());
  for (long j = 1; j <= 20; ++j) CHECK(run.final_state.occupied(j));
}

TEST_CASE("step simulation preconditions") {
  CHECK_THROWS_AS(simulate_step_ic(AsepParams::tasep(), 50, -1.0, 1), ArgumentError);
  // ceil(25) + 10 sqrt(25) = 75 must be strictly exceeded.
  CHECK_THROWS_AS(simulate_step_ic(AsepParams::tasep(), 75, 25.0, 1), ArgumentError);
  CHECK_NOTHROW(simulate_step_ic(AsepParams::tasep(), 76, 25.0, 1));
  CHECK(min_step_halfwidth(25.0) == 76);
}

TEST_CASE("trajectories keep order and are reproducible") {
  StepRunOptions options;
  options.tags = {1, 2, 3, 10};
  options.observe_at = {5.0, 10.0};
  options.trajectory = 4;
  const auto a = simulate_step_ic(AsepParams::from_p(0.25), min_step_halfwidth(20.0), 20.0, 17, options);
  const auto b = simulate_step_ic(AsepParams::from_p(0.25), min_step_halfwidth(20.0), 20.0, 17, options);
  CHECK(a.final_state.occupation == b.final_state.occupation);
  CHECK(a.events == b.events);
  CHECK(a.final_state.consistent());
  REQUIRE(a.observations.size() == 3);
  CHECK(a.observations.back().time == 20.0);
  for (const auto& obs : a.observations) {
    REQUIRE(obs.tagged_positions.size() == 4);
    CHECK(obs.height == 2 * obs.current);
    for (std::size_t i = 1; i < obs.tagged_positions.size(); ++i)
      CHECK(obs.tagged_positions[i - 1] < obs.tagged_positions[i]);
  }
  CHECK(a.observations.back().current == a.final_state.bond_counter);
  CHECK(a.final_state.height_at_origin() == 2 * a.final_state.bond_counter);
  // Particle count conservation over the window.
  const auto count = std::accumulate(a.final_state.occupation.begin(), a.final_state.occupation.end(), 0);
  CHECK(count == min_step_halfwidth(20.0));
}

namespace {

std::vector<double> step_currents(const AsepParams& params, double t, int trials, std::uint64_t seed) {
  std::vector<double> n(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) {
    StepRunOptions o;
    o.trajectory = static_cast<std::uint64_t>(i);
    n[static_cast<std::size_t>(i)] =
        static_cast<double>(simulate_step_ic(params, min_step_halfwidth(t), t, seed, o).final_state.bond_counter);
  }
  return n;
}

}  // namespace

TEST_CASE("symmetric exclusion: mean current matches independent walkers") {
  // The one-point density of SSEP is that of independent walkers, so
  // E N(t) = sum_{j>=1} P(X_t <= -j) = E|X_t| / 2 with X_t a rate-1 symmetric
  // walk: P(X_t = k) = e^{-t} I_k(t). Note the mean does not vanish.
  const double t = 50.0;
  double abs_mean = 0.0;
  for (int k = 1; k < 400; ++k) abs_mean += 2.0 * k * std::exp(-t) * std::cyl_bessel_i(static_cast<double>(k), t);
  const int trials = 10000;
  const auto n = step_currents(AsepParams::from_p(0.5), t, trials, 3);
  const double se = std::sqrt(sample_variance(n) / trials);
  CHECK(abs_mean / 2.0 == doctest::Approx(std::sqrt(t / (2.0 * M_PI))).epsilon(0.02));
  CHECK(std::abs(sample_mean(n) - abs_mean / 2.0) < 3.0 * se);
}

TEST_CASE("TASEP current grows like t / 4") {
  // E N(t) = t/4 + 2^{-4/3} |E chi| t^{1/3} + o(t^{1/3}), chi Tracy-Widom GUE
  // with mean -1.7710868: the rate approaches 1/4 from above.
  auto expected = [](double t) { return t / 4.0 + std::pow(2.0, -4.0 / 3.0) * 1.7710868 * std::cbrt(t); };
  double prev_rate = 1.0;
  for (const auto& [t, trials] : {std::pair{50.0, 4000}, {100.0, 10000}, {200.0, 2000}}) {
    const double rate = sample_mean(step_currents(AsepParams::tasep(), t, trials, 4)) / t;
    CAPTURE(t);
    CHECK(std::abs(rate - expected(t) / t) < 0.1 * expected(t) / t);
    CHECK(rate < prev_rate);
    CHECK(rate > 0.25);
    prev_rate = rate;
  }
}

TEST_CASE("weak asymmetry preset") {
  CHECK_THROWS_AS(weak_asymmetry_preset(0.0), ArgumentError);
  CHECK_THROWS_AS(weak_asymmetry_preset(0.3), ArgumentError);
  const auto a = weak_asymmetry_preset(0.25);
  CHECK(a.params.p == doctest::Approx(0.25));
  CHECK(a.params.q == doctest::Approx(0.75));
  CHECK(a.time_scale == doctest::Approx(16.0));
  const auto b = weak_asymmetry_preset(0.01);
  CHECK(b.params.q - b.params.p == doctest::Approx(0.1));
  CHECK(b.time_scale == doctest::Approx(1e4));
}
