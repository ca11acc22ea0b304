#include "toom/airy.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "toom/error.hpp"

// Ai is tabulated (value and derivative) on a grid of spacing kStep over
// [kAiryMin, kTableMax]. Any other point is one Taylor step away from the
// nearest grid point; the Taylor coefficients follow from Ai'' = x Ai.
//
// Table construction:
//   x <= 0   forward steps from the exact values at the origin. The equation is
//            oscillatory there, so errors grow only linearly.
//   x >= 0   backward steps from the asymptotic expansion at kTableMax. Going
//            left, Ai is the dominant solution and Bi decays, so the recursion
//            keeps full relative accuracy all the way to the origin.
// Right of kTableMax the asymptotic series is used directly (zeta >= 27, so the
// optimally truncated series is far below double precision).

namespace toom::rmt {
namespace {

constexpr double kStep = 0.125;
constexpr double kTableMax = 12.0;

// Ai(0) = 3^{-2/3} / Gamma(2/3), Ai'(0) = -3^{-1/3} / Gamma(1/3).
constexpr double kAi0 = 0.35502805388781723926;
constexpr double kAiPrime0 = -0.25881940379280679840;

struct AiryPair {
  double value;
  double derivative;
};

// Value and derivative at x0 + h from those at x0.
AiryPair taylor_step(double x0, const AiryPair& at, double h) {
  // a[k] are Taylor coefficients of Ai around x0.
  double a_km1 = 0.0;           // a[k-1]
  double a_k = at.value;        // a[k]
  double a_kp1 = at.derivative; // a[k+1]
  double value = a_k + a_kp1 * h;
  double deriv = a_kp1;
  double hk = h;  // h^k for the derivative term k a[k] h^{k-1}
  double hk1 = h * h;
  int small_terms = 0;
  for (int k = 0; k < 200; ++k) {
    // a[k+2] = (x0 a[k] + a[k-1]) / ((k+1)(k+2))
    const double a_kp2 = (x0 * a_k + a_km1) / ((k + 1.0) * (k + 2.0));
    const double term = a_kp2 * hk1;
    const double dterm = (k + 2.0) * a_kp2 * hk;
    value += term;
    deriv += dterm;
    if (std::abs(term) + std::abs(dterm) < 1e-18 * (std::abs(value) + std::abs(deriv))) {
      if (++small_terms == 2) break;
    } else {
      small_terms = 0;
    }
    a_km1 = a_k;
    a_k = a_kp1;
    a_kp1 = a_kp2;
    hk *= h;
    hk1 *= h;
  }
  return {value, deriv};
}

// Asymptotic series for x large and positive, returned with the factor
// exp(-zeta) removed.
AiryPair asymptotic_scaled(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double x14 = std::sqrt(std::sqrt(x));
  double u = 1.0;
  double sum_u = 1.0;
  double sum_v = 1.0;
  double zk = 1.0;
  double last = 1.0;
  for (int k = 1; k < 100; ++k) {
    u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
    const double v = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u;
    zk *= -zeta;
    const double tu = u / zk;
    if (std::abs(tu) > last) break;  // past the optimal truncation point
    last = std::abs(tu);
    sum_u += tu;
    sum_v += v / zk;
    if (std::abs(tu) < 1e-18) break;
  }
  const double pref = 0.5 / std::sqrt(std::numbers::pi);
  return {pref / x14 * sum_u, -pref * x14 * sum_v};
}

class AiryTable {
 public:
  AiryTable() {
    const auto count = static_cast<std::size_t>(std::lround((kTableMax - kAiryMin) / kStep)) + 1;
    table_.resize(count);
    const auto zero = index_of(0.0);
    table_[zero] = {kAi0, kAiPrime0};
    for (std::size_t i = zero; i > 0; --i) {
      table_[i - 1] = taylor_step(grid(i), table_[i], -kStep);
    }
    const double zeta = 2.0 / 3.0 * kTableMax * std::sqrt(kTableMax);
    const AiryPair s = asymptotic_scaled(kTableMax);
    const double e = std::exp(-zeta);
    table_.back() = {s.value * e, s.derivative * e};
    for (std::size_t i = count - 1; i > zero + 1; --i) {
      table_[i - 1] = taylor_step(grid(i), table_[i], -kStep);
    }
  }

  AiryPair eval(double x) const {
    const double pos = (x - kAiryMin) / kStep;
    auto i = static_cast<std::size_t>(std::lround(pos));
    if (i >= table_.size()) i = table_.size() - 1;
    const double x0 = grid(i);
    return taylor_step(x0, table_[i], x - x0);
  }

 private:
  static double grid(std::size_t i) { return kAiryMin + static_cast<double>(i) * kStep; }
  static std::size_t index_of(double x) {
    return static_cast<std::size_t>(std::lround((x - kAiryMin) / kStep));
  }

  std::vector<AiryPair> table_;
};

const AiryTable& table() {
  static const AiryTable t;
  return t;
}

AiryPair eval_unchecked(double x) {
  if (x > kTableMax) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const AiryPair s = asymptotic_scaled(x);
    const double e = std::exp(-zeta);
    return {s.value * e, s.derivative * e};
  }
  return table().eval(x);
}

void check_range(double x, const char* what) {
  if (!(x >= kAiryMin && x <= kAiryMax)) {
    throw DomainError(std::string(what) + ": argument " + std::to_string(x) +
                      " outside [-20, 40]");
  }
}

}  // namespace

double airy_ai(double x) {
  check_range(x, "airy_ai");
  return eval_unchecked(x).value;
}

double airy_ai_prime(double x) {
  check_range(x, "airy_ai_prime");
  return eval_unchecked(x).derivative;
}

double airy_ai_scaled(double x) {
  if (!(x >= 0.0)) throw DomainError("airy_ai_scaled needs x >= 0");
  if (x > kTableMax) return asymptotic_scaled(x).value;
  return table().eval(x).value * std::exp(2.0 / 3.0 * x * std::sqrt(x));
}

double airy_ai_unbounded(double x) {
  if (!(x >= kAiryMin)) {
    throw DomainError("airy_ai_unbounded: argument " + std::to_string(x) + " below -20");
  }
  return eval_unchecked(x).value;
}

}  // namespace toom::rmt
