#pragma once

// Equal-time spin-spin correlations of a lattice window, pooled over sites and
// lanes, with batch-means error bars over sample times.

#include <cstddef>
#include <vector>

#include "toom/lattice.hpp"

namespace toom {

struct CorrelationRow {
  std::size_t lag = 0;
  double value = 0.0;   ///< <s_i s_{i+j}> - <s_i><s_{i+j}>
  double std_error = 0.0;  ///< batch-means standard error (NaN with < 2 batches)
};

class TwoPointCorrelation {
 public:
  /// Pairs (i, i + j) with i in [window_start, window_start + window_len) and
  /// 1 <= j <= max_lag. On the ring i + j wraps; on the half-line the pair
  /// must lie inside the lattice. `samples_per_batch` consecutive snapshots
  /// form one batch. Throws ConfigError for empty windows or batches.
  TwoPointCorrelation(std::size_t window_start, std::size_t window_len, std::size_t max_lag,
                      std::size_t samples_per_batch);

  /// Adds one snapshot. Throws ConfigError when the window does not fit.
  void push(const SpinLattice& lattice);

  std::size_t samples() const { return samples_; }
  std::size_t complete_batches() const { return samples_ / samples_per_batch_; }

  /// One row per lag. Throws InsufficientData before the first snapshot.
  std::vector<CorrelationRow> table() const;

 private:
  struct Sums {
    double pairs = 0;
    std::vector<double> prod, left, right;
  };

  static double estimate(const Sums& s, std::size_t lag);

  std::size_t start_, len_, max_lag_, samples_per_batch_;
  std::size_t samples_ = 0;
  Sums total_;
  std::vector<Sums> batches_;
};

}  // namespace toom
