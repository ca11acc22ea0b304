#include <cmath>

#include <doctest.h>

#include "toom/coefficients.hpp"
#include "toom/error.hpp"

using namespace toom;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_SUITE("coefficients") {
  TEST_CASE("model params reject lambda outside (0, 1]") {
    CHECK_THROWS_AS(ModelParams(0.0), DomainError);
    CHECK_THROWS_AS(ModelParams(-0.1), DomainError);
    CHECK_THROWS_AS(ModelParams(1.0 + 1e-12), DomainError);
    CHECK_THROWS_AS(ModelParams(std::nan("")), DomainError);
    CHECK_NOTHROW(ModelParams(1.0));
    CHECK_NOTHROW(ModelParams(1e-6));
  }

  TEST_CASE("stationary magnetization examples") {
    CHECK(stationary_magnetization(ModelParams(1.0)) == 0.0);
    CHECK(stationary_magnetization(ModelParams(0.25)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(std::abs(stationary_magnetization(ModelParams(0.125)) - 0.477592) < 1e-6);
  }

  TEST_CASE("spin current examples") {
    const ModelParams p8(0.125);
    CHECK(spin_current(0.0, p8) == doctest::Approx(-1.75).epsilon(1e-15));
    CHECK(spin_current(1.0 / 3.0, ModelParams(1.0)) == doctest::Approx(3.0).epsilon(1e-15));
    for (const double l : {0.01, 0.125, 0.25, 0.7, 1.0}) {
      const ModelParams p(l);
      CHECK(std::abs(spin_current(stationary_magnetization(p), p)) < 1e-14);
    }
    CHECK_THROWS_AS(spin_current(1.0, p8), DomainError);
    CHECK_THROWS_AS(spin_current(-1.0, p8), DomainError);
    CHECK_THROWS_AS(spin_current(1.5, p8), DomainError);
  }

  TEST_CASE("kpz coefficient examples") {
    const Coefficients c1 = kpz_coefficients(ModelParams(1.0));
    CHECK(c1.v == 8.0);
    CHECK(c1.G == 0.0);
    CHECK(c1.A == 1.0);
    CHECK(c1.A_t == 8.0);
    CHECK(c1.Gamma_t == 0.0);
    CHECK(c1.mu0 == 0.0);
    CHECK(c1.degenerate());

    const Coefficients c4 = kpz_coefficients(ModelParams(0.25));
    CHECK(c4.v == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(c4.G == doctest::Approx(3.375).epsilon(1e-15));
    CHECK(c4.A == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
    CHECK(c4.A_t == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(c4.G_t == doctest::Approx(-1.0 / 27.0).epsilon(1e-14));
    CHECK(c4.Gamma_t == doctest::Approx(16.0 / 27.0).epsilon(1e-14));

    const Coefficients c8 = kpz_coefficients(ModelParams(0.125));
    CHECK(rel(c8.v, 3.664214) < 1e-5);
    CHECK(rel(c8.G, 4.5342) < 1e-5);
    CHECK(rel(c8.A, 0.771906) < 1e-5);
    CHECK(rel(c8.A_t, 2.828427) < 1e-5);
    CHECK(rel(c8.G_t, -0.0921640) < 1e-5);
    CHECK(rel(c8.Gamma_t, 0.737312) < 1e-5);
    CHECK_FALSE(c8.degenerate());
  }

  TEST_CASE("identities over 200 log-spaced lambda values") {
    for (int i = 0; i < 200; ++i) {
      const double lambda = std::pow(10.0, -3.0 + 3.0 * i / 199.0);
      const ModelParams p(std::min(lambda, 1.0));
      const Coefficients c = kpz_coefficients(p);
      CAPTURE(lambda);
      CHECK(std::abs(spin_current(c.mu0, p)) <= 1e-12);
      CHECK(std::abs(c.v * c.v_t - 1.0) <= 1e-12);
      if (c.G != 0.0) CHECK(rel(c.G, -c.G_t * c.v * c.v * c.v) <= 1e-12);
      CHECK(rel(c.A_t, c.A * c.v) <= 1e-12);
      const double closed = kpz_amplitude_closed_form(p);
      if (closed != 0.0) {
        CHECK(rel(c.Gamma_t, std::abs(c.G_t) * c.A_t * c.A_t) <= 1e-12);
        CHECK(rel(c.Gamma_t, closed) <= 1e-12);
      }
      CHECK(c.mu0 >= 0.0);
      CHECK(c.mu0 < 1.0);
      CHECK(c.v > 0.0);
      CHECK(c.A > 0.0);
      CHECK(c.A_t > 0.0);
      CHECK(c.Gamma_t >= 0.0);
    }
  }

  TEST_CASE("finite differences of the current reproduce v and G") {
    const double h = 1e-5, h2 = 1e-4;
    for (const double lambda : {0.125, 0.25, 0.5}) {
      const ModelParams p(lambda);
      const Coefficients c = kpz_coefficients(p);
      const double jp = spin_current(c.mu0 + h, p), j0 = spin_current(c.mu0, p),
                   jm = spin_current(c.mu0 - h, p);
      CAPTURE(lambda);
      CHECK(rel((jp - jm) / (2 * h), c.v) <= 1e-6);
      const double kp = spin_current(c.mu0 + h2, p), km = spin_current(c.mu0 - h2, p);
      CHECK(rel((kp - 2 * j0 + km) / (h2 * h2), c.G) <= 1e-6);
    }
  }

  TEST_CASE("susceptibility equals the Bernoulli spin variance") {
    for (const double lambda : {0.01, 0.125, 0.5, 1.0}) {
      const Coefficients c = kpz_coefficients(ModelParams(lambda));
      CHECK(c.A == doctest::Approx(1.0 - c.mu0 * c.mu0).epsilon(1e-14));
    }
  }
}
