#pragma once

// Scaling constants of the Toom spin exchange model as functions of the
// asymmetry rate ratio lambda.

namespace toom {

/// Rate ratio of the model. A + spin exchanges with the nearest - spin to its
/// right at rate lambda, a - spin with the nearest + spin at rate 1.
class ModelParams {
 public:
  /// Throws DomainError unless 0 < lambda <= 1.
  explicit ModelParams(double lambda);

  double lambda() const { return lambda_; }
  double sqrt_lambda() const { return sqrt_lambda_; }

 private:
  double lambda_;
  double sqrt_lambda_;
};

/// Non-universal constants. The `_t` members are the coefficients of the
/// space-time interchanged interface (drift, curvature, susceptibility in the
/// time direction and the KPZ amplitude).
struct Coefficients {
  double mu0 = 0;      ///< stationary magnetization
  double v = 0;        ///< propagation speed J'(mu0)
  double G = 0;        ///< current curvature J''(mu0)
  double A = 0;        ///< spatial susceptibility 1 - mu0^2
  double v_t = 0;      ///< 1 / v
  double G_t = 0;      ///< -G / v^3
  double A_t = 0;      ///< A v
  double Gamma_t = 0;  ///< |G_t| A_t^2

  bool degenerate() const { return Gamma_t == 0.0; }
};

double stationary_magnetization(const ModelParams& params);

/// Steady-state spin current of the Bernoulli measure with magnetization mu.
/// Throws DomainError for |mu| >= 1.
double spin_current(double mu, const ModelParams& params);

Coefficients kpz_coefficients(const ModelParams& params);

/// Closed form 8 sqrt(l) (1 - sqrt(l)) (1 + sqrt(l))^-3 of the KPZ amplitude,
/// kept separate from the |G_t| A_t^2 route in kpz_coefficients.
double kpz_amplitude_closed_form(const ModelParams& params);

}  // namespace toom
