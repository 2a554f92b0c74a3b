#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

#include "kpzlab/errors.hpp"
#include "kpzlab/fredholm.hpp"
#include "kpzlab/kpz_exact.hpp"

using namespace kpz;

namespace {

KernelFunction rank_one(double alpha) {
  return KernelFunction([alpha](double x, double y) { return std::exp(-alpha * (x + y)); }, "rank-one");
}

}  // namespace

TEST_CASE("zero kernel gives exactly one") {
  KernelFunction zero([](double, double) { return 0.0; }, "zero");
  const auto r = fredholm_det(zero, {0.0, 1.0}, 10);
  CHECK(r.value == 1.0);
  CHECK(r.doubling_gap == 0.0);
  CHECK(r.nodes_used == 10);
}

TEST_CASE("rank-one identity on [0, 8]") {
  const auto r = fredholm_det(rank_one(1.0), {0.0, 8.0}, 40);
  CHECK(std::abs(r.value - (1.0 + std::exp(-16.0)) / 2.0) < 1e-10);
  CHECK(r.doubling_gap >= 0.0);
}

TEST_CASE("rank-one identity for random decay rates") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> rate(0.5, 3.0);
  for (int i = 0; i < 5; ++i) {
    const double a = rate(gen);
    const double b = 12.0;
    const double exact = 1.0 - (1.0 - std::exp(-2.0 * a * b)) / (2.0 * a);
    CAPTURE(a);
    CHECK(std::abs(fredholm_det(rank_one(a), {0.0, b}, 40).value - exact) < 1e-10);
  }
}

TEST_CASE("symmetrized Nystrom matrix is symmetric for symmetric kernels") {
  const auto k = make_airy_kernel();
  const auto rule = gauss_legendre(30, -2.0, 8.0);
  const Eigen::MatrixXd a = nystrom_matrix(k, rule);
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  // Positive semidefinite with norm below one, so the determinant lies in (0, 1].
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  CHECK(eig.eigenvalues().minCoeff() > -1e-12);
  CHECK(eig.eigenvalues().maxCoeff() < 1.0);
  const double det = nystrom_det(k, rule);
  CHECK(det > 0.0);
  CHECK(det <= 1.0);
}

TEST_CASE("Airy kernel on [0, 10]: m = 60 against m = 120") {
  const auto r = fredholm_det(make_airy_kernel(), {0.0, 10.0}, 60);
  CHECK(r.nodes_used == 60);
  CHECK(r.doubling_gap < 1e-8);
}

TEST_CASE("monotone refinement of the doubling gap") {
  const auto k = make_airy_kernel();
  const Interval dom{-3.0, 12.0};
  double prev = std::numeric_limits<double>::infinity();
  for (int m : {6, 12, 24}) {
    const double gap = fredholm_det(k, dom, m).doubling_gap;
    CAPTURE(m);
    CHECK(gap <= prev);
    prev = gap;
  }
  const auto c = make_crossover_kernel({0.5, 50.0});
  const auto dom_c = truncate_domain(c, 0.0);
  const double g10 = fredholm_det(c, dom_c, 10).doubling_gap;
  const double g20 = fredholm_det(c, dom_c, 20).doubling_gap;
  CHECK(g20 <= g10);
}

TEST_CASE("truncation growth leaves the Airy determinant unchanged") {
  const auto k = make_airy_kernel();
  const auto dom = truncate_domain(k, -1.0);
  const double a = fredholm_det(k, dom, 60).value;
  const double b = fredholm_det(k, {dom.lower, dom.upper + 4.0}, 60).value;
  CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("truncate_domain") {
  const auto airy = truncate_domain(make_airy_kernel(), 0.0, 1e-16);
  CHECK(airy.lower == 0.0);
  CHECK(airy.upper >= 8.0);
  CHECK(airy.upper <= 16.0);
  // The cut is where K_Ai(x, x) itself falls below the tolerance.
  CHECK(airy_kernel(airy.upper, airy.upper) < 1e-16);
  CHECK(airy_kernel(airy.upper - 1.0, airy.upper - 1.0) > 1e-16);

  KernelFunction covariant([](double x, double y) { return std::exp(-(x + y)); }, "covariant");
  covariant.with_decay({[](double d) { return std::exp(-2.0 * d); }, true});
  const auto at0 = truncate_domain(covariant, 0.0);
  const auto at_m4 = truncate_domain(covariant, -4.0);
  CHECK(at_m4.upper == doctest::Approx(at0.upper - 4.0).epsilon(1e-12));

  KernelFunction flat([](double, double) { return 0.1; }, "flat");
  CHECK_THROWS_AS(truncate_domain(flat, 0.0), ConfigurationError);
  flat.with_decay({[](double) { return 0.1; }, false});
  CHECK_THROWS_AS(truncate_domain(flat, 0.0), ConfigurationError);
  CHECK_THROWS_AS(truncate_domain(make_airy_kernel(), 0.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(truncate_domain(make_airy_kernel(), 0.0, 1e-3), ArgumentError);
}

TEST_CASE("errors") {
  KernelFunction bad([](double x, double) { return x > 0.5 ? std::nan("") : 0.0; }, "bad");
  try {
    fredholm_det(bad, {0.0, 1.0}, 8);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.details().count("x") == 1);
    CHECK(e.details().count("y") == 1);
    CHECK(e.details().at("x") > 0.5);
  }
  KernelFunction zero([](double, double) { return 0.0; });
  CHECK_THROWS_AS(fredholm_det(zero, {0.0, 1.0}, 1), ArgumentError);
  CHECK_THROWS_AS(fredholm_det(zero, {1.0, 1.0}, 10), ArgumentError);
  CHECK_THROWS_AS(fredholm_det(zero, {0.0, 1.0}, 100000), ResourceError);
}

TEST_CASE("result does not depend on the evaluation path") {
  // Grid evaluator versus plain pointwise evaluation of the same kernel.
  const auto fast = make_airy_kernel();
  KernelFunction slow([](double x, double y) { return airy_kernel(x, y); }, "pointwise");
  const auto rule = gauss_legendre(24, -2.0, 10.0);
  CHECK(std::abs(nystrom_det(fast, rule) - nystrom_det(slow, rule)) < 1e-13);
  CHECK(nystrom_det(fast, rule) == nystrom_det(fast, rule));
}
