#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "toom/error.hpp"

namespace toom::rmt {

/// Nodes and weights of an interpolatory rule on a finite interval.
template <typename Scalar>
struct Quadrature {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector nodes;
  Vector weights;

  Eigen::Index size() const { return nodes.size(); }

  template <typename F>
  Scalar integrate(F&& f) const {
    Scalar sum(0);
    for (Eigen::Index i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// m-point Gauss-Legendre rule on (a, b). Nodes come from Newton iteration on
/// the three-term recurrence of P_m and are returned in increasing order.
template <typename Scalar = double>
Quadrature<Scalar> gauss_legendre(int m, Scalar a, Scalar b) {
  if (m < 2) throw DomainError("gauss_legendre: need at least two nodes");
  if (!(a < b)) throw DomainError("gauss_legendre: need a < b");

  using std::abs;
  using std::cos;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar eps = Eigen::NumTraits<Scalar>::epsilon();
  const Scalar half_len = (b - a) / 2;
  const Scalar mid = (a + b) / 2;

  Quadrature<Scalar> q;
  q.nodes.resize(m);
  q.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    Scalar x = cos(pi * (i + Scalar(0.75)) / (m + Scalar(0.5)));
    Scalar dp(0);
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0(1), p1 = x;
      for (int k = 2; k <= m; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= 4 * eps) break;
    }
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    // x runs from near +1 downwards.
    q.nodes[m - 1 - i] = mid + half_len * x;
    q.nodes[i] = mid - half_len * x;
    q.weights[m - 1 - i] = half_len * w;
    q.weights[i] = half_len * w;
  }
  if (m % 2 == 1) q.nodes[m / 2] = mid;
  return q;
}

/// Gauss-Legendre rule with `m` nodes on each panel between consecutive
/// breakpoints. Breakpoints must be strictly increasing.
template <typename Scalar = double>
Quadrature<Scalar> composite_gauss_legendre(std::span<const Scalar> breaks, int m) {
  if (breaks.size() < 2) throw DomainError("composite_gauss_legendre: need two breakpoints");
  const auto panels = static_cast<Eigen::Index>(breaks.size() - 1);
  Quadrature<Scalar> q;
  q.nodes.resize(panels * m);
  q.weights.resize(panels * m);
  for (Eigen::Index p = 0; p < panels; ++p) {
    const auto piece = gauss_legendre<Scalar>(m, breaks[p], breaks[p + 1]);
    q.nodes.segment(p * m, m) = piece.nodes;
    q.weights.segment(p * m, m) = piece.weights;
  }
  return q;
}

}  // namespace toom::rmt
