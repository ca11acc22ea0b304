#include "toom/tracy_widom.hpp"

#include <array>
#include <cmath>
#include <string>

#include "toom/airy.hpp"
#include "toom/error.hpp"

namespace toom::rmt {
namespace {

constexpr double kCdfMin = -10.0;
constexpr double kCdfMax = 10.0;
constexpr double kDensityStep = 1e-4;

double cdf_unchecked(double s, const NystromOptions& opt) {
  return det_identity_minus(goe_kernel_matrix(s, opt));
}

double density_unchecked(double s, const NystromOptions& opt) {
  return (cdf_unchecked(s + kDensityStep, opt) - cdf_unchecked(s - kDensityStep, opt)) /
         (2.0 * kDensityStep);
}

}  // namespace

Matrix<double> goe_kernel_matrix(double s, const NystromOptions& opt) {
  if (opt.nodes < 2 || !(opt.length > 0)) throw DomainError("goe_kernel_matrix: bad rule");
  const auto q = gauss_legendre<double>(opt.nodes, s, s + opt.length);
  const Eigen::VectorXd sw = q.weights.cwiseSqrt();
  const Eigen::Index m = q.size();
  Matrix<double> k(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = sw[i] * airy_ai_unbounded(q.nodes[i] + q.nodes[j]) * sw[j];
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

double tw_goe_cdf(double s, const NystromOptions& opt) {
  if (!(s >= kCdfMin && s <= kCdfMax)) {
    throw DomainError("tw_goe_cdf: s = " + std::to_string(s) + " outside [-10, 10]");
  }
  return cdf_unchecked(s, opt);
}

double tw_goe_density(double s, const NystromOptions& opt) {
  if (!(s - kDensityStep >= kCdfMin && s + kDensityStep <= kCdfMax)) {
    throw DomainError("tw_goe_density: s = " + std::to_string(s) + " outside the cdf range");
  }
  return density_unchecked(s, opt);
}

Moments tw_goe_moments(const NystromOptions& opt) {
  constexpr double lo = -10.0;
  constexpr double hi = 8.0;
  constexpr int panels = 18;
  constexpr int per_panel = 20;
  std::array<double, panels + 1> breaks{};
  for (int p = 0; p <= panels; ++p) breaks[p] = lo + (hi - lo) * p / panels;
  const auto q = composite_gauss_legendre<double>(std::span<const double>(breaks), per_panel);

  Eigen::VectorXd f(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) f[i] = density_unchecked(q.nodes[i], opt);

  Moments out;
  out.mass = q.weights.dot(f);
  out.mean = q.weights.dot(q.nodes.cwiseProduct(f)) / out.mass;
  const Eigen::VectorXd d = q.nodes.array() - out.mean;
  const Eigen::VectorXd d2 = d.cwiseProduct(d);
  const double mu2 = q.weights.dot(d2.cwiseProduct(f)) / out.mass;
  const double mu3 = q.weights.dot(d2.cwiseProduct(d).cwiseProduct(f)) / out.mass;
  const double mu4 = q.weights.dot(d2.cwiseProduct(d2).cwiseProduct(f)) / out.mass;
  out.variance = mu2;
  out.skewness = mu3 / std::pow(mu2, 1.5);
  out.kurtosis = mu4 / (mu2 * mu2);
  return out;
}

std::vector<DensityRow> tw_goe_table(double lo, double hi, int points, const NystromOptions& opt) {
  if (points < 2 || !(lo < hi)) throw DomainError("tw_goe_table: bad grid");
  std::vector<DensityRow> rows;
  rows.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double s = lo + (hi - lo) * i / (points - 1);
    rows.push_back({s, tw_goe_cdf(s, opt), tw_goe_density(s, opt)});
  }
  return rows;
}

}  // namespace toom::rmt
