#pragma once

// Streaming statistics of interface magnetizations: rescaling, cumulants with
// batch-means errors, histograms, structure functions and covariance curves.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

#include "toom/coefficients.hpp"
#include "toom/error.hpp"

namespace toom {

/// Affine map value = (M - shift) / scale of a raw magnetization of the window
/// [1, n] onto the fluctuation scale: shift = mu0 n, scale = (Gamma_t n)^(1/3).
struct InterfaceScaling {
  double shift = 0.0;
  double scale = 1.0;

  /// Throws DomainError when Gamma_t = 0 (lambda = 1) or n = 0.
  static InterfaceScaling of(std::size_t n, const Coefficients& coeffs);

  double apply(double m) const { return (m - shift) / scale; }
  double invert(double s) const { return shift + scale * s; }
};

struct RescaledSample {
  double value = 0.0;
};

/// (M - mu0 n) / (Gamma_t n)^(1/3). Throws DomainError when Gamma_t = 0.
RescaledSample rescale(std::int64_t m, std::size_t n, const Coefficients& coeffs);

/// Mean, variance, skewness mu3 / mu2^(3/2) and plain kurtosis mu4 / mu2^2.
struct Cumulants {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = std::numeric_limits<double>::quiet_NaN();
  double kurtosis = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;  ///< zero variance: skewness and kurtosis undefined

  /// Statistics of a + b X given those of X.
  Cumulants affine(double a, double b) const;
};

struct CumulantEstimate {
  std::size_t count = 0;
  std::size_t batches = 0;
  Cumulants value;
  /// Batch-means standard errors; NaN unless at least kMinErrorBatches batches.
  Cumulants error;
  bool has_errors = false;

  CumulantEstimate affine(double a, double b) const;
};

inline constexpr std::size_t kMinErrorBatches = 16;

namespace detail {
struct PowerSums {
  long double n = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
};
/// Central statistics from power sums about an origin. Throws InsufficientData
/// for fewer than two samples.
Cumulants cumulants_from_sums(const PowerSums& p, double origin, bool exact);
CumulantEstimate combine(const PowerSums& total, std::span<const PowerSums> batches,
                         double origin, bool exact);
}  // namespace detail

/// Streaming power sums up to fourth order, kept per batch. Integer samples are
/// summed exactly in 128-bit integers about `shift`, so totals do not depend on
/// the order of pushes or merges; floating samples use long double sums.
template <typename T>
class MomentAccumulator {
  static_assert(std::is_arithmetic_v<T>);
  using Sum = std::conditional_t<std::is_integral_v<T>, __int128, long double>;

 public:
  /// `batch_size` samples per batch (0: batches only close on end_batch()).
  explicit MomentAccumulator(std::size_t batch_size = 0, T shift = T{})
      : batch_size_(batch_size), shift_(shift) {}

  void push(T x) {
    const Sum d = static_cast<Sum>(x) - static_cast<Sum>(shift_);
    const Sum d2 = d * d;
    open_.add(d, d2);
    total_.add(d, d2);
    if (batch_size_ != 0 && open_.n == static_cast<Sum>(batch_size_)) end_batch();
  }

  /// Closes the current batch (no-op when it is empty).
  void end_batch() {
    if (open_.n == 0) return;
    closed_.push_back(open_);
    open_ = {};
  }

  /// Adds the other accumulator's samples; its batches (including a partial
  /// one) become closed batches here. Shifts must agree.
  void merge(const MomentAccumulator& other) {
    if (other.shift_ != shift_) throw ConfigError("merging accumulators with different shifts");
    end_batch();
    closed_.insert(closed_.end(), other.closed_.begin(), other.closed_.end());
    if (other.open_.n != 0) closed_.push_back(other.open_);
    total_.merge(other.total_);
  }

  std::size_t count() const { return static_cast<std::size_t>(total_.n); }
  std::size_t batches() const { return closed_.size(); }
  T shift() const { return shift_; }

  /// Throws InsufficientData for fewer than two samples. Only closed batches
  /// enter the error estimate.
  CumulantEstimate cumulants() const {
    std::vector<detail::PowerSums> batches;
    batches.reserve(closed_.size());
    for (const auto& b : closed_) batches.push_back(b.widen());
    return detail::combine(total_.widen(), batches, static_cast<double>(shift_),
                           std::is_integral_v<T>);
  }

  friend bool operator==(const MomentAccumulator&, const MomentAccumulator&) = default;

 private:
  struct Sums {
    Sum n = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    void add(Sum d, Sum d2) {
      n += 1;
      s1 += d;
      s2 += d2;
      s3 += d2 * d;
      s4 += d2 * d2;
    }
    void merge(const Sums& o) {
      n += o.n;
      s1 += o.s1;
      s2 += o.s2;
      s3 += o.s3;
      s4 += o.s4;
    }
    detail::PowerSums widen() const {
      return {static_cast<long double>(n), static_cast<long double>(s1),
              static_cast<long double>(s2), static_cast<long double>(s3),
              static_cast<long double>(s4)};
    }
    friend bool operator==(const Sums&, const Sums&) = default;
  };

  std::size_t batch_size_;
  T shift_;
  Sums total_;
  Sums open_;
  std::vector<Sums> closed_;
};

struct DensityBin {
  double center = 0.0;
  double density = 0.0;
  std::size_t count = 0;
};

/// Histogram normalized to unit integral, bins [origin + k w, origin + (k+1) w)
/// covering min..max of the samples without gaps. Throws InsufficientData for
/// empty input, DomainError for a nonpositive width.
std::vector<DensityBin> binned_density(std::span<const double> samples, double width,
                                       double origin = 0.0);

/// Raw magnetization histogram, one bin of width 2 centred on each value of the
/// parity of n.
std::vector<DensityBin> raw_density(std::span<const std::int64_t> m, std::size_t n);

struct RescaledDensity {
  double width = 0.0;        ///< rescaled bin width
  std::size_t values_per_bin = 1;
  std::vector<DensityBin> bins;
  std::vector<double> edges;  ///< bins.size() + 1 rescaled bin edges
};

/// Raw bins grouped k at a time, k the smallest count whose rescaled width
/// 2k / (Gamma_t n)^(1/3) reaches `min_width`, so no rescaled bin straddles a
/// lattice value.
RescaledDensity rescaled_density(std::span<const std::int64_t> m, std::size_t n,
                                 const Coefficients& coeffs, double min_width = 0.1);

struct PlateauEstimate {
  double value = 0.0;
  double std_error = std::numeric_limits<double>::quiet_NaN();
  std::size_t lo = 0;  ///< first lag of the plateau window
  std::size_t hi = 0;  ///< last lag of the plateau window
};

struct CovarianceRow {
  double t_resc = 0.0;
  double cov_resc = 0.0;
  double std_error = std::numeric_limits<double>::quiet_NaN();
};

using CovarianceCurve = std::vector<CovarianceRow>;

/// Structure function S(j) = <(M(i) - M(i + j))^2>, j = 0..T, from series
/// blocks of T + 1 points at unit time spacing. Every pair inside a block
/// contributes; blocks are grouped into batches for error bars.
class StructureFunctionAccumulator {
 public:
  /// `blocks_per_batch` = 0: batches only close on end_batch().
  /// Throws ConfigError for max_lag = 0.
  explicit StructureFunctionAccumulator(std::size_t max_lag, std::size_t blocks_per_batch = 0);

  /// Throws ConfigError unless series.size() == max_lag + 1.
  void push_series_block(std::span<const double> series);
  void end_batch();
  void merge(const StructureFunctionAccumulator& other);

  std::size_t max_lag() const { return max_lag_; }
  std::size_t blocks() const { return blocks_; }
  std::size_t batches() const { return closed_.size(); }

  /// S(j), j = 0..T. Throws InsufficientData before the first block.
  std::vector<double> structure() const;
  std::vector<std::uint64_t> pair_counts() const { return total_.counts; }

  /// Mean of S(j) / 2 over integer lags in [n^(2/3), 2 n^(2/3)]. Throws
  /// InsufficientData when T < 2 n^(2/3) or there are no blocks.
  PlateauEstimate plateau_variance(std::size_t n) const;

  /// Cov(j) = Var - S(j) / 2 on axes t_resc = A_t j / (2 (Gamma_t n)^(2/3)),
  /// cov_resc = Cov / (Gamma_t n)^(2/3). Throws DomainError when Gamma_t = 0.
  CovarianceCurve covariance_curve(std::size_t n, const Coefficients& coeffs) const;

  /// Per-batch sums, for serialization: batch b holds sums[j] and counts[j].
  struct Batch {
    std::vector<double> sums;
    std::vector<std::uint64_t> counts;
  };
  std::span<const Batch> closed_batches() const { return closed_; }
  /// Rebuilds an accumulator from serialized batches.
  static StructureFunctionAccumulator from_batches(std::size_t max_lag, std::vector<Batch> batches);

 private:
  Batch empty_batch() const;
  static void add_into(Batch& into, const Batch& from);
  double plateau_of(const Batch& b, std::size_t lo, std::size_t hi) const;

  std::size_t max_lag_;
  std::size_t blocks_per_batch_;
  std::size_t blocks_ = 0;
  std::size_t open_blocks_ = 0;
  Batch total_;
  Batch open_;
  std::vector<Batch> closed_;
};

/// Integer lag window [ceil(n^(2/3)), floor(2 n^(2/3))] of the plateau.
std::pair<std::size_t, std::size_t> plateau_window(std::size_t n);

}  // namespace toom
