#include <doctest.h>

#include <cmath>
#include <random>

#include "kpzlab/errors.hpp"
#include "kpzlab/kpz_exact.hpp"
#include "kpzlab/special_fn.hpp"

using namespace kpz;

TEST_CASE("Fermi factor") {
  const CrossoverParams p{1.3, 16.0};
  const FermiFactor f(p);
  CHECK(f.scale() == doctest::Approx(2.0));
  CHECK(f(f.midpoint()) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 0.0;
  for (double l = -20.0; l <= 20.0; l += 0.125) {
    const double v = f(l);
    CHECK(v >= prev);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK(f(-5.0) > 0.0);
  CHECK(f(5.0) < 1.0);
  CHECK_THROWS_AS(CrossoverParams({0.0, 0.0}).validate(), ArgumentError);
  CHECK_THROWS_AS(CrossoverParams({std::nan(""), 1.0}).validate(), ArgumentError);
}

TEST_CASE("crossover kernel symmetry") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  const CrossoverParams p{-1.0, 50.0};
  for (int i = 0; i < 20; ++i) {
    const double x = u(gen), y = u(gen);
    CHECK(std::abs(crossover_kernel(x, y, p) - crossover_kernel(y, x, p)) < 1e-12);
  }
  CHECK_THROWS_AS(crossover_kernel(-0.1, 0.0, p), ArgumentError);
}

TEST_CASE("crossover kernel vanishes for large s") {
  const CrossoverParams p{60.0, 1.0};
  for (double x = 0.0; x <= 2.0; x += 0.5)
    for (double y = 0.0; y <= 2.0; y += 0.5) CHECK(std::abs(crossover_kernel(x, y, p)) < 1e-20);
}

TEST_CASE("crossover kernel approaches the shifted Airy kernel at large t") {
  const double t = 1e6;
  for (const double sigma : {0.0, -1.0}) {
    const CrossoverParams p{sigma * std::cbrt(t / 2.0), t};
    const double c = p.scale();
    for (double x = 0.0; x <= 2.0; x += 0.5)
      for (double y = 0.0; y <= 2.0; y += 0.5) {
        const double k = crossover_kernel(x, y, p);
        const double limit = airy_kernel(x + sigma, y + sigma);
        // Leading Sommerfeld correction of the smoothed step: the Fermi
        // factor minus the indicator is odd about its midpoint, so the first
        // surviving term is -(pi^2 / (6 c^2)) d/dlambda [Ai(x+l) Ai(y+l)].
        const auto ax = airy_ai_both(x + sigma), ay = airy_ai_both(y + sigma);
        const double slope = ax.ai_prime * ay.ai + ax.ai * ay.ai_prime;
        const double corrected = limit - M_PI * M_PI / (6.0 * c * c) * slope;
        CAPTURE(sigma);
        CAPTURE(x);
        CAPTURE(y);
        CHECK(std::abs(k - limit) < 1e-4);
        CHECK(std::abs(k - corrected) < 1e-6);
      }
  }
}

TEST_CASE("Airy kernel") {
  for (const double x : {-2.0, 0.0, 1.0}) {
    const auto a = airy_ai_both(x);
    CHECK(std::abs(airy_kernel(x, x) - (a.ai_prime * a.ai_prime - x * a.ai * a.ai)) < 1e-8);
  }
  CHECK(airy_kernel(10.0, 10.0) < 1e-18);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 20; ++i) {
    const double x = u(gen), y = u(gen);
    CHECK(std::abs(airy_kernel(x, y) - airy_kernel(y, x)) < 1e-12);
  }
  // Off-diagonal closed form (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y).
  const auto a = airy_ai_both(-1.0), b = airy_ai_both(0.5);
  CHECK(std::abs(airy_kernel(-1.0, 0.5) - (a.ai * b.ai_prime - a.ai_prime * b.ai) / (-1.5)) < 1e-10);
}

TEST_CASE("generating function limits and monotonicity") {
  const auto r = kpz_genfun({60.0, 1.0});
  CHECK(std::abs(r.value - 1.0) < 1e-10);
  for (const double t : {1.0, 100.0}) {
    double prev = 0.0;
    for (double s = -8.0; s <= 8.0; s += 1.0) {
      const double v = kpz_genfun({s, t}).value;
      CAPTURE(t);
      CAPTURE(s);
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
      CHECK(v >= prev);
      prev = v;
    }
  }
  CHECK_THROWS_AS(kpz_genfun({0.0, 1.0}, 10), ArgumentError);
  CHECK_THROWS_AS(kpz_genfun({0.0, -1.0}), ArgumentError);
}

TEST_CASE("doubling gap at m = 40 vs 80") {
  for (const double t : {10.0, 100.0, 1e4}) {
    const double c = std::cbrt(t / 2.0);
    for (const double sigma : {-4.0, -2.0, 0.0, 2.0}) {
      const auto r = kpz_genfun({sigma * c, t}, 40);
      CAPTURE(t);
      CAPTURE(sigma);
      CHECK(r.doubling_gap < 1e-8);
      CHECK(r.nodes_used == 40);
    }
  }
}

TEST_CASE("generating function against Tracy-Widom at t = 1e4") {
  const double t = 1e4;
  for (const double sigma : {-2.0, 0.0, 2.0}) {
    const double g = kpz_genfun({sigma * std::cbrt(t / 2.0), t}).value;
    CAPTURE(sigma);
    CHECK(std::abs(g - tw_gue_cdf(sigma)) < 0.05);
  }
}

TEST_CASE("Tracy-Widom GUE distribution function") {
  CHECK(std::abs(tw_gue_cdf(8.0) - 1.0) < 1e-10);
  CHECK(std::abs(tw_gue_cdf(-10.0)) < 1e-4);
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = tw_gue_cdf(-6.0 + 0.1 * i);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(tw_gue_cdf(4.0) - tw_gue_cdf(-6.0) >= 1.0 - 1e-4);
  CHECK(tw_gue_cdf(4.0) - tw_gue_cdf(-6.0) <= 1.0);
  // -1.771 is the mean of the distribution, not its median; the value there
  // (frozen from an independent Christoffel-Darboux Nystrom run) is 0.5151.
  CHECK(std::abs(tw_gue_cdf(-1.771) - 0.51514) < 2e-4);
  CHECK_THROWS_AS(tw_gue_cdf(std::nan("")), ArgumentError);
}

TEST_CASE("Tracy-Widom table moments") {
  const TwGueTable table;
  // Frozen reference moments: mean -1.7710868, variance 0.8131947, skewness 0.2240842.
  CHECK(std::abs(table.mean() + 1.7710868) < 1e-4);
  CHECK(std::abs(table.stddev() * table.stddev() - 0.8131947) < 1e-3);
  CHECK(std::abs(table.skewness() - 0.2240842) < 5e-3);
  CHECK(table.cdf(-100.0) == 0.0);
  CHECK(table.cdf(100.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(table.cdf(-1.3) - tw_gue_cdf(-1.3)) < 1e-3);
  CHECK(table.standardized_cdf(0.0) == doctest::Approx(table.cdf(table.mean())));
}
