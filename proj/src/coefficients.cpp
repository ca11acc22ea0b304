#include "toom/coefficients.hpp"

#include <cmath>
#include <string>

#include "toom/error.hpp"

namespace toom {

ModelParams::ModelParams(double lambda) : lambda_(lambda), sqrt_lambda_(0) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw DomainError("lambda must lie in (0, 1], got " + std::to_string(lambda));
  }
  sqrt_lambda_ = std::sqrt(lambda);
}

double stationary_magnetization(const ModelParams& params) {
  const double r = params.sqrt_lambda();
  return (1.0 - r) / (1.0 + r);
}

double spin_current(double mu, const ModelParams& params) {
  if (!(std::abs(mu) < 1.0)) {
    throw DomainError("spin_current needs |mu| < 1, got " + std::to_string(mu));
  }
  const double lambda = params.lambda();
  return 2.0 * (lambda * (1.0 + mu) / (1.0 - mu) - (1.0 - mu) / (1.0 + mu));
}

Coefficients kpz_coefficients(const ModelParams& params) {
  const double r = params.sqrt_lambda();
  const double p = 1.0 + r;
  const double m = 1.0 - r;

  Coefficients c;
  c.mu0 = stationary_magnetization(params);
  c.v = 2.0 * p * p;
  c.G = p * p * p * m / r;
  c.A = 4.0 * r / (p * p);
  c.v_t = 1.0 / c.v;
  c.G_t = -c.G / (c.v * c.v * c.v);
  c.A_t = c.A * c.v;
  c.Gamma_t = std::abs(c.G_t) * c.A_t * c.A_t;
  return c;
}

double kpz_amplitude_closed_form(const ModelParams& params) {
  const double r = params.sqrt_lambda();
  const double p = 1.0 + r;
  return 8.0 * r * (1.0 - r) / (p * p * p);
}

}  // namespace toom
