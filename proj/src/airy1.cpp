#include "toom/airy1.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "toom/airy.hpp"
#include "toom/error.hpp"
#include "toom/tracy_widom.hpp"

namespace toom::rmt {
namespace {

// Ai(z) exp(w) without intermediate under/overflow.
double airy_times_exp(double z, double w) {
  if (z <= 0.0) return airy_ai_unbounded(z) * std::exp(w);
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  return airy_ai_scaled(z) * std::exp(w - zeta);
}

Quadrature<double> subset(const Quadrature<double>& q, double above) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q.nodes[i] > above) keep.push_back(i);
  }
  Quadrature<double> out;
  out.nodes.resize(static_cast<Eigen::Index>(keep.size()));
  out.weights.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.nodes[static_cast<Eigen::Index>(k)] = q.nodes[keep[k]];
    out.weights[static_cast<Eigen::Index>(k)] = q.weights[keep[k]];
  }
  return out;
}

Matrix<double> block_operator(const Quadrature<double>& q1, const Quadrature<double>& q2,
                              double t) {
  const Eigen::Index n1 = q1.size();
  const Eigen::Index n2 = q2.size();
  Matrix<double> k(n1 + n2, n1 + n2);
  k.topLeftCorner(n1, n1) = kernel_matrix(q1, q1, [t](double x, double y) {
    return airy1_kernel(0.0, x, 0.0, y);
  });
  k.topRightCorner(n1, n2) = kernel_matrix(q1, q2, [t](double x, double y) {
    return airy1_kernel(0.0, x, t, y);
  });
  k.bottomLeftCorner(n2, n1) = kernel_matrix(q2, q1, [t](double x, double y) {
    return airy1_kernel(t, x, 0.0, y);
  });
  k.bottomRightCorner(n2, n2) = kernel_matrix(q2, q2, [t](double x, double y) {
    return airy1_kernel(t, x, t, y);
  });
  return k;
}

// t = 0: both slices live on one composite rule with a breakpoint at
// max(s1, s2); the cross block carries -delta(x - x') = -identity on shared nodes.
double joint_cdf_equal_times(double s1, double s2, const JointOptions& opt) {
  const double lo = std::min(s1, s2);
  const double hi = std::max(s1, s2);
  std::vector<double> breaks{lo};
  if (hi > lo) breaks.push_back(hi);
  breaks.push_back(hi + opt.length);
  const auto common = composite_gauss_legendre<double>(std::span<const double>(breaks), opt.nodes);
  const auto q1 = subset(common, s1);
  const auto q2 = subset(common, s2);

  Matrix<double> k = block_operator(q1, q2, 0.0);
  const Eigen::Index n1 = q1.size();
  for (Eigen::Index a = 0; a < n1; ++a) {
    for (Eigen::Index b = 0; b < q2.size(); ++b) {
      if (q1.nodes[a] == q2.nodes[b]) k(a, n1 + b) -= 1.0;
    }
  }
  return det_identity_minus(k);
}

}  // namespace

double airy1_kernel(double t, double x, double t_prime, double x_prime) {
  const double dt = t_prime - t;
  double value = airy_times_exp(x + x_prime + dt * dt,
                                dt * (x + x_prime) + 2.0 / 3.0 * dt * dt * dt);
  if (dt > 0.0) {
    const double dx = x_prime - x;
    value -= std::exp(-dx * dx / (4.0 * dt)) / std::sqrt(4.0 * std::numbers::pi * dt);
  }
  return value;
}

double airy1_joint_cdf(double t, double s1, double s2, const JointOptions& opt) {
  if (!(t >= 0.0)) throw DomainError("airy1_joint_cdf: need t >= 0");
  if (opt.nodes < 2 || !(opt.length > 0.0)) throw DomainError("airy1_joint_cdf: bad rule");
  if (t == 0.0) return joint_cdf_equal_times(s1, s2, opt);
  const auto q1 = gauss_legendre<double>(opt.nodes, s1, s1 + opt.length);
  const auto q2 = gauss_legendre<double>(opt.nodes, s2, s2 + opt.length);
  return det_identity_minus(block_operator(q1, q2, t));
}

}  // namespace toom::rmt

namespace toom::rmt {
namespace {

// Distance-from-diagonal breakpoints of the graded panels.
constexpr double kLayerBreaks[] = {0.0, 0.05, 0.15, 0.35, 0.75, 1.55, 3.15, 6.35, 12.75, 25.55};

Quadrature<double> graded_rule(double span, int per_panel) {
  std::vector<double> breaks;
  for (double b : kLayerBreaks) {
    if (b < span) breaks.push_back(b);
  }
  breaks.push_back(span);
  if (breaks.size() >= 3 && span - breaks[breaks.size() - 2] < 1e-3) {
    breaks.erase(breaks.end() - 2);
  }
  return composite_gauss_legendre<double>(std::span<const double>(breaks), per_panel);
}

}  // namespace

double g1(double t, const CovarianceMesh& mesh) {
  if (!(t >= 0.0)) throw DomainError("g1: need t >= 0");
  if (!(mesh.lo < mesh.hi)) throw DomainError("g1: empty integration square");

  JointOptions joint = mesh.joint;
  if (t > 0.0) {
    const int needed = static_cast<int>(std::ceil(mesh.small_t_factor * joint.length / std::sqrt(t)));
    joint.nodes = std::max(joint.nodes, needed);
  }
  const NystromOptions marginal{};

  const auto outer = gauss_legendre<double>(mesh.outer, mesh.lo, mesh.hi);
  Eigen::VectorXd marginal_at_outer(outer.size());
  for (Eigen::Index i = 0; i < outer.size(); ++i) {
    marginal_at_outer[i] = tw_goe_cdf(outer.nodes[i], marginal);
  }

  // Upper triangle s2 = x + u (s1 = x), lower triangle s1 = x + u (s2 = x).
  double total = 0.0;
  for (Eigen::Index i = 0; i < outer.size(); ++i) {
    const double x = outer.nodes[i];
    const double span = mesh.hi - x;
    if (span <= 0.0) continue;
    const auto inner = graded_rule(span, mesh.panel_nodes);
    double row = 0.0;
    for (Eigen::Index j = 0; j < inner.size(); ++j) {
      const double y = x + inner.nodes[j];
      const double fy = tw_goe_cdf(y, marginal);
      const double product = marginal_at_outer[i] * fy;
      const double upper = airy1_joint_cdf(t, x, y, joint) - product;
      const double lower = airy1_joint_cdf(t, y, x, joint) - product;
      row += inner.weights[j] * (upper + lower);
    }
    total += outer.weights[i] * row;
  }
  return total;
}

std::vector<G1Row> g1_curve(double t_max, int points, const CovarianceMesh& mesh,
                            unsigned threads) {
  if (points < 2 || !(t_max > 0.0)) throw DomainError("g1_curve: need t_max > 0 and two points");
  std::vector<G1Row> rows(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) rows[k].t = t_max * k / (points - 1);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(points));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) rows[k].g1 = g1(rows[k].t, mesh);
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work);
  }
  return rows;
}

}  // namespace toom::rmt
