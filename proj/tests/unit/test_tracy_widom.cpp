#include <cmath>

#include <doctest.h>

#include "toom/error.hpp"
#include "toom/quadrature.hpp"
#include "toom/tracy_widom.hpp"

using namespace toom;
using namespace toom::rmt;

TEST_SUITE("tracy_widom") {
  TEST_CASE("tails") {
    CHECK(std::abs(1.0 - tw_goe_cdf(8.0)) < 1e-8);
    CHECK(tw_goe_cdf(-6.0) < 1e-8);
    CHECK(tw_goe_cdf(-6.0) >= 0.0);
    CHECK_THROWS_AS(tw_goe_cdf(10.5), DomainError);
    CHECK_THROWS_AS(tw_goe_cdf(-10.5), DomainError);
  }

  TEST_CASE("determinant converges under refinement") {
    const NystromOptions fine{120, 16.0};
    CHECK(std::abs(tw_goe_cdf(0.0) - tw_goe_cdf(0.0, fine)) <= 1e-9);
    // Regression anchor: F_1(0) = P(xi_GOE <= 0).
    CHECK(std::abs(tw_goe_cdf(0.0) - 0.8319080662) <= 1e-9);
    double worst = 0.0;
    for (double s = -6.0; s <= 4.0 + 1e-9; s += 0.25) {
      worst = std::max(worst, std::abs(tw_goe_cdf(s) - tw_goe_cdf(s, fine)));
    }
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("kernel matrix is symmetric") {
    const auto k = goe_kernel_matrix(-1.3);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(k.allFinite());
  }

  TEST_CASE("cdf is nondecreasing and the density nonnegative") {
    double prev = 0.0;
    for (double s = -8.0; s <= 6.0 + 1e-9; s += 0.05) {
      const double f = tw_goe_cdf(s);
      CHECK(f >= prev - 1e-10);
      prev = f;
    }
    const auto table = tw_goe_table(-8.0, 6.0, 141);
    REQUIRE(table.size() == 141);
    CHECK(table.front().s == -8.0);
    CHECK(table.back().s == 6.0);
    for (const auto& row : table) CHECK(row.density >= -1e-9);
  }

  TEST_CASE("density integrates to one") {
    const auto q = gauss_legendre(120, -8.0, 6.0);
    const double mass = q.integrate([](double s) { return tw_goe_density(s); });
    CHECK(std::abs(mass - 1.0) <= 1e-6);
  }

  TEST_CASE("moments") {
    const Moments m = tw_goe_moments();
    CHECK(std::abs(m.mass - 1.0) <= 1e-8);
    CHECK(std::abs(m.mean - -0.6033) <= 0.0015);
    CHECK(std::abs(m.skewness - 0.2931) <= 0.003);
    CHECK(std::abs(m.kurtosis - 3.165) <= 0.005);
    // Var(xi_GOE) = 1.6077810345 in the literature; our variable is xi_GOE / 2.
    CHECK(std::abs(m.variance - 1.6077810345 / 4.0) <= 1e-6);
  }
}
