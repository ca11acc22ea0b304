#pragma once

// Simulation-versus-theory comparison of a half-line run: rescaled density
// against the GOE edge law, cumulants against targets, and the rescaled
// covariance curve against g1.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "toom/coefficients.hpp"
#include "toom/estimators.hpp"

namespace toom {

struct CumulantTargets {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  std::string source;
};

/// Published finite-n cumulants of the rescaled magnetization at lambda = 1/8
/// for n in {10^4, 2 10^4, 5 10^4, 10^5}, if n is one of them.
std::optional<CumulantTargets> published_cumulants(std::size_t n);

/// The n = infinity row as quoted alongside the finite-n rows.
CumulantTargets published_limit();

/// Moments of the GOE edge law computed by the quadrature stack.
CumulantTargets computed_limit();

struct CompareOptions {
  double lambda = 0.125;
  std::size_t n = 0;
  double density_tol = 0.02;
  double sigma = 3.0;
  double min_bin_width = 0.1;
  std::size_t cumulant_batches = 32;
  /// Default: the published row for n if there is one, else computed_limit().
  std::optional<CumulantTargets> targets;
  double g1_t_max = 1.5;
  int g1_points = 16;
  double cov_t_max = 1.0;          ///< covariance rows checked against g1
  double cov_allowance = 0.02;     ///< systematic allowance added to sigma * stderr
  double tail_allowance = 1e-3;    ///< allowance for lags >= 2 n^(2/3)
};

struct DensityCompareRow {
  double s = 0.0;
  double empirical = 0.0;
  double theory = 0.0;
  double diff = 0.0;
};

struct CovarianceCompareRow {
  double t_resc = 0.0;
  double cov_resc = 0.0;
  double std_error = 0.0;
  double g1 = 0.0;  ///< NaN beyond the tabulated range
};

struct Check {
  std::string name;
  double empirical = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double deviation = 0.0;
  double relative = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ComparisonReport {
  std::size_t n = 0;
  double density_bin_width = 0.0;
  std::vector<DensityCompareRow> density;
  double density_sup_diff = 0.0;
  CumulantEstimate cumulants;  ///< of the rescaled magnetization
  std::string target_source;
  std::optional<PlateauEstimate> plateau;  ///< rescaled
  std::vector<CovarianceCompareRow> covariance;
  std::vector<Check> checks;
  bool pass = false;
};

/// Throws InsufficientData for empty samples, DomainError when lambda = 1.
ComparisonReport compare_run(std::span<const std::int64_t> samples,
                             const StructureFunctionAccumulator* structure,
                             const CompareOptions& options);

/// density.csv, cumulants.csv, checks.csv, covariance.csv (if any), summary.txt.
void write_report(const ComparisonReport& report, const std::filesystem::path& dir);
std::string summary_text(const ComparisonReport& report);

}  // namespace toom
