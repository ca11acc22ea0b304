#pragma once

#include <vector>

#include "toom/fredholm.hpp"

namespace toom::rmt {

/// Discretisation of the two-time extended kernel: `nodes` Gauss-Legendre
/// points per time slice on (s_i, s_i + length).
struct JointOptions {
  int nodes = 40;
  double length = 10.0;
};

/// Extended Airy_1 kernel K_1(t, x; t', x') between times t and t'.
double airy1_kernel(double t, double x, double t_prime, double x_prime);

/// P(A_1(0) <= s1, A_1(t) <= s2) as det(I - K) on L^2((s1, inf) x {1} u (s2, inf) x {2}).
/// At t = 0 the heat-kernel part of the cross block degenerates to a delta
/// function; that limit is discretised on a shared node set so the identity
/// term is exact.
double airy1_joint_cdf(double t, double s1, double s2, const JointOptions& opt = {});

/// Integration mesh for the covariance integral over [lo, hi]^2. The square is
/// split along its diagonal; each triangle uses `outer` Gauss points along the
/// diagonal direction and graded panels of `panel_nodes` points away from it,
/// which resolves the near-diagonal layer of width ~ sqrt(t).
struct CovarianceMesh {
  double lo = -6.0;
  double hi = 6.0;
  int outer = 40;
  int panel_nodes = 6;
  JointOptions joint{};
  /// Extra Nystrom resolution for small t: the rule uses
  /// max(joint.nodes, ceil(small_t_factor * length / sqrt(t))) points.
  double small_t_factor = 1.0;
};

/// Covariance g_1(t) = Cov(A_1(0), A_1(t)) from
/// Cov(X, Y) = integral of [P(X <= s1, Y <= s2) - P(X <= s1) P(Y <= s2)].
double g1(double t, const CovarianceMesh& mesh = {});

struct G1Row {
  double t;
  double g1;
};

/// g_1 tabulated on `points` equally spaced times in [0, t_max]. Rows are
/// computed on up to `threads` worker threads (0 = hardware concurrency).
std::vector<G1Row> g1_curve(double t_max = 1.5, int points = 30,
                            const CovarianceMesh& mesh = {}, unsigned threads = 0);

}  // namespace toom::rmt
