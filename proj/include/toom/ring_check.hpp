#pragma once

// Validation runs on the ring: steady-state current, equal-time spin
// correlations and the growth rate of the integrated-current variance.

#include <cstdint>
#include <vector>

#include "toom/correlation.hpp"
#include "toom/lattice.hpp"

namespace toom {

struct RingCheckConfig {
  std::size_t size = 4096;
  double lambda = 0.125;
  double mu = 0.0;  ///< Bernoulli magnetization: a spin is -1 with probability (1 - mu) / 2
  std::uint64_t seed = 1;
  double duration = 1e4;
  std::size_t replicas = 1;  ///< independent words, run one after another
  std::size_t max_lag = 4;
  double snapshot_interval = 10.0;  ///< time between correlation snapshots
  /// Window length for the current variance; also tabulated at 1/4 and 1/2 of
  /// it. Keep v * window well below N: on a finite ring the variance rate
  /// departs from its infinite-volume value as v * window / N grows.
  double variance_window = 32.0;
  /// Time batches for error bars when replicas = 1; with more replicas each
  /// replica word is one batch.
  std::size_t batches = 20;
  TimeMode mode = TimeMode::Exact;

  /// Throws ConfigError / DomainError.
  void validate() const;
};

struct ValueWithError {
  double value = 0.0;
  double std_error = 0.0;
};

struct VarianceGrowthRow {
  double window = 0.0;
  ValueWithError variance;  ///< Var of the integrated current over the window
  ValueWithError rate;      ///< variance / window
};

struct RingCheckReport {
  double theory_current = 0.0;  ///< J(mu) of the Bernoulli measure
  double theory_rate = 0.0;     ///< (1 - mu^2) |J'(mu)|
  ValueWithError current;       ///< per unit time, averaged over bonds and lanes
  ValueWithError tracked_bond_current;  ///< bond (0, 1) alone, from direct tallies
  std::vector<CorrelationRow> correlations;
  std::vector<VarianceGrowthRow> growth;  ///< windows w/4, w/2, w
  std::int64_t magnetization_drift = 0;   ///< max |M(end) - M(0)| over lanes (must be 0)
  std::uint64_t events = 0;
};

RingCheckReport run_ring_check(const RingCheckConfig& config);

}  // namespace toom
