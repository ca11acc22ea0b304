#include "toom/correlation.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "toom/error.hpp"

namespace toom {
namespace {

// Sum over the 64 lanes of the spin (+1 / -1) encoded in w.
double lane_sum(Word w) { return kLanes - 2.0 * std::popcount(w); }

}  // namespace

TwoPointCorrelation::TwoPointCorrelation(std::size_t window_start, std::size_t window_len,
                                         std::size_t max_lag, std::size_t samples_per_batch)
    : start_(window_start), len_(window_len), max_lag_(max_lag),
      samples_per_batch_(samples_per_batch) {
  if (window_len == 0 || max_lag == 0 || samples_per_batch == 0) {
    throw ConfigError("correlation window, lag range and batch size must be positive");
  }
  total_.prod.assign(max_lag + 1, 0.0);
  total_.left = total_.right = total_.prod;
}

void TwoPointCorrelation::push(const SpinLattice& lattice) {
  const std::size_t n = lattice.size();
  const bool ring = lattice.topology() == Topology::Ring;
  if (start_ + len_ > n || (!ring && start_ + len_ + max_lag_ > n) || (ring && max_lag_ >= n)) {
    throw ConfigError("correlation window does not fit the lattice");
  }
  if (samples_ % samples_per_batch_ == 0) {
    Sums fresh;
    fresh.prod.assign(max_lag_ + 1, 0.0);
    fresh.left = fresh.right = fresh.prod;
    batches_.push_back(std::move(fresh));
  }
  Sums& batch = batches_.back();
  const auto w = lattice.words();
  for (std::size_t lag = 1; lag <= max_lag_; ++lag) {
    double prod = 0, left = 0, right = 0;
    for (std::size_t i = start_; i < start_ + len_; ++i) {
      const std::size_t k = ring ? (i + lag) % n : i + lag;
      prod += lane_sum(w[i] ^ w[k]);
      left += lane_sum(w[i]);
      right += lane_sum(w[k]);
    }
    batch.prod[lag] += prod;
    batch.left[lag] += left;
    batch.right[lag] += right;
    total_.prod[lag] += prod;
    total_.left[lag] += left;
    total_.right[lag] += right;
  }
  const double pairs = static_cast<double>(len_) * kLanes;
  batch.pairs += pairs;
  total_.pairs += pairs;
  ++samples_;
}

double TwoPointCorrelation::estimate(const Sums& s, std::size_t lag) {
  return s.prod[lag] / s.pairs - (s.left[lag] / s.pairs) * (s.right[lag] / s.pairs);
}

std::vector<CorrelationRow> TwoPointCorrelation::table() const {
  if (samples_ == 0) throw InsufficientData("correlation: no snapshots");
  const std::size_t full = complete_batches();
  std::vector<CorrelationRow> rows;
  for (std::size_t lag = 1; lag <= max_lag_; ++lag) {
    CorrelationRow row{lag, estimate(total_, lag), std::numeric_limits<double>::quiet_NaN()};
    if (full >= 2) {
      double mean = 0, sq = 0;
      for (std::size_t b = 0; b < full; ++b) mean += estimate(batches_[b], lag);
      mean /= static_cast<double>(full);
      for (std::size_t b = 0; b < full; ++b) {
        const double d = estimate(batches_[b], lag) - mean;
        sq += d * d;
      }
      row.std_error = std::sqrt(sq / static_cast<double>(full - 1) / static_cast<double>(full));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace toom
