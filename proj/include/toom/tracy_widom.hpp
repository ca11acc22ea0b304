#pragma once

#include <vector>

#include "toom/fredholm.hpp"

namespace toom::rmt {

/// Rule parameters of the Nystrom discretisation of det(I - K) on (s, s + L).
struct NystromOptions {
  int nodes = 60;
  double length = 12.0;
};

/// Symmetric Nystrom matrix of the kernel Ai(x + y) on (s, s + L).
Matrix<double> goe_kernel_matrix(double s, const NystromOptions& opt = {});

/// P(xi_GOE / 2 <= s) = F_1(2 s) = det(I - K)_{L^2(s, inf)}, K(x, y) = Ai(x + y).
/// Valid for s in [-10, 10]; throws DomainError outside.
double tw_goe_cdf(double s, const NystromOptions& opt = {});

/// Density of xi_GOE / 2 by a central difference (step 1e-4) of tw_goe_cdf.
double tw_goe_density(double s, const NystromOptions& opt = {});

/// Mean, variance, skewness and (plain, non-excess) kurtosis.
struct Moments {
  double mean = 0;
  double variance = 0;
  double skewness = 0;
  double kurtosis = 0;
  double mass = 0;  ///< integral of the density over the quadrature range
};

/// Moments of xi_GOE / 2 from Gauss-Legendre quadrature of s^k against
/// tw_goe_density on [-10, 8].
Moments tw_goe_moments(const NystromOptions& opt = {});

struct DensityRow {
  double s;
  double cdf;
  double density;
};

/// Table of cdf and density on a uniform grid [lo, hi] with `points` rows.
std::vector<DensityRow> tw_goe_table(double lo, double hi, int points,
                                     const NystromOptions& opt = {});

}  // namespace toom::rmt
