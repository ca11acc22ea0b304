#include "toom/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace toom {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double cbrt_scale(std::size_t n, const Coefficients& coeffs) {
  if (coeffs.degenerate()) {
    throw DomainError("KPZ amplitude vanishes (lambda = 1): the rescaling is degenerate");
  }
  if (n == 0) throw DomainError("window size must be positive");
  return std::cbrt(coeffs.Gamma_t * static_cast<double>(n));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

InterfaceScaling InterfaceScaling::of(std::size_t n, const Coefficients& coeffs) {
  const double scale = cbrt_scale(n, coeffs);
  return {coeffs.mu0 * static_cast<double>(n), scale};
}

RescaledSample rescale(std::int64_t m, std::size_t n, const Coefficients& coeffs) {
  return {InterfaceScaling::of(n, coeffs).apply(static_cast<double>(m))};
}

Cumulants Cumulants::affine(double a, double b) const {
  Cumulants out = *this;
  out.mean = a + b * mean;
  out.variance = b * b * variance;
  if (b < 0) out.skewness = -skewness;
  if (b == 0) {
    out.degenerate = true;
    out.skewness = out.kurtosis = kNaN;
  }
  return out;
}

CumulantEstimate CumulantEstimate::affine(double a, double b) const {
  CumulantEstimate out = *this;
  out.value = value.affine(a, b);
  // Errors scale with |b| (mean), b^2 (variance); shape statistics are invariant.
  out.error.mean = std::abs(b) * error.mean;
  out.error.variance = b * b * error.variance;
  return out;
}

namespace detail {

Cumulants cumulants_from_sums(const PowerSums& p, double origin, bool exact) {
  if (p.n < 2) throw InsufficientData("cumulants need at least two samples");
  const long double n = p.n;
  const long double m = p.s1 / n;
  const long double r2 = p.s2 / n, r3 = p.s3 / n, r4 = p.s4 / n;
  const long double c2 = r2 - m * m;
  const long double c3 = r3 - 3 * m * r2 + 2 * m * m * m;
  const long double c4 = r4 - 4 * m * r3 + 6 * m * m * r2 - 3 * m * m * m * m;

  Cumulants out;
  out.mean = static_cast<double>(origin + m);
  // Integer sums are exact, so a zero variance is detected exactly; floating
  // sums allow for rounding in r2 - m^2.
  const long double floor = exact ? 0.0L : 64 * std::numeric_limits<double>::epsilon() * r2;
  if (c2 <= floor) {
    out.variance = 0.0;
    out.degenerate = true;
    return out;
  }
  out.variance = static_cast<double>(c2);
  out.skewness = static_cast<double>(c3 / (c2 * std::sqrt(c2)));
  out.kurtosis = static_cast<double>(c4 / (c2 * c2));
  return out;
}

CumulantEstimate combine(const PowerSums& total, std::span<const PowerSums> batches,
                         double origin, bool exact) {
  CumulantEstimate est;
  est.count = static_cast<std::size_t>(total.n);
  est.batches = batches.size();
  est.value = cumulants_from_sums(total, origin, exact);
  est.error = Cumulants{kNaN, kNaN, kNaN, kNaN, false};
  if (batches.size() < kMinErrorBatches || est.value.degenerate) return est;

  std::vector<Cumulants> per;
  per.reserve(batches.size());
  for (const auto& b : batches) {
    if (b.n < 2) return est;
    per.push_back(cumulants_from_sums(b, origin, exact));
    if (per.back().degenerate) return est;
  }
  const double k = static_cast<double>(per.size());
  auto stderr_of = [&](double Cumulants::*field) {
    double mean = 0.0, sq = 0.0;
    for (const auto& c : per) mean += c.*field;
    mean /= k;
    for (const auto& c : per) sq += (c.*field - mean) * (c.*field - mean);
    return std::sqrt(sq / (k - 1) / k);
  };
  est.error.mean = stderr_of(&Cumulants::mean);
  est.error.variance = stderr_of(&Cumulants::variance);
  est.error.skewness = stderr_of(&Cumulants::skewness);
  est.error.kurtosis = stderr_of(&Cumulants::kurtosis);
  est.has_errors = true;
  return est;
}

}  // namespace detail

std::vector<DensityBin> binned_density(std::span<const double> samples, double width,
                                       double origin) {
  if (samples.empty()) throw InsufficientData("histogram of an empty sample");
  if (!(width > 0.0)) throw DomainError("bin width must be positive");
  std::map<std::int64_t, std::size_t> counts;
  for (const double x : samples) {
    if (!std::isfinite(x)) throw DomainError("histogram sample is not finite");
    ++counts[static_cast<std::int64_t>(std::floor((x - origin) / width))];
  }
  const std::int64_t lo = counts.begin()->first, hi = counts.rbegin()->first;
  const double norm = 1.0 / (static_cast<double>(samples.size()) * width);
  std::vector<DensityBin> bins;
  bins.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t k = lo; k <= hi; ++k) {
    const auto it = counts.find(k);
    const std::size_t c = it == counts.end() ? 0 : it->second;
    bins.push_back({origin + (static_cast<double>(k) + 0.5) * width, c * norm, c});
  }
  return bins;
}

std::vector<DensityBin> raw_density(std::span<const std::int64_t> m, std::size_t n) {
  std::vector<double> values(m.begin(), m.end());
  // Bins [v - 1, v + 1) centred on values with the parity of n.
  return binned_density(values, 2.0, static_cast<double>(n) + 1.0);
}

RescaledDensity rescaled_density(std::span<const std::int64_t> m, std::size_t n,
                                 const Coefficients& coeffs, double min_width) {
  if (m.empty()) throw InsufficientData("histogram of an empty sample");
  if (!(min_width > 0.0)) throw DomainError("bin width must be positive");
  const InterfaceScaling sc = InterfaceScaling::of(n, coeffs);
  const double spacing = 2.0 / sc.scale;
  const auto k = static_cast<std::int64_t>(std::max(1.0, std::ceil(min_width / spacing - 1e-12)));
  const std::int64_t span = 2 * k;
  const auto anchor = static_cast<std::int64_t>(n) + 1;  // raw edge between two lattice values

  std::map<std::int64_t, std::size_t> counts;
  for (const std::int64_t v : m) ++counts[floor_div(v - anchor, span)];
  const std::int64_t lo = counts.begin()->first, hi = counts.rbegin()->first;

  RescaledDensity out;
  out.values_per_bin = static_cast<std::size_t>(k);
  out.width = static_cast<double>(span) / sc.scale;
  const double norm = 1.0 / (static_cast<double>(m.size()) * out.width);
  for (std::int64_t b = lo; b <= hi + 1; ++b) {
    out.edges.push_back(sc.apply(static_cast<double>(anchor + b * span)));
  }
  for (std::int64_t b = lo; b <= hi; ++b) {
    const auto it = counts.find(b);
    const std::size_t c = it == counts.end() ? 0 : it->second;
    const auto i = static_cast<std::size_t>(b - lo);
    out.bins.push_back({0.5 * (out.edges[i] + out.edges[i + 1]), c * norm, c});
  }
  return out;
}

std::pair<std::size_t, std::size_t> plateau_window(std::size_t n) {
  const double a = std::pow(static_cast<double>(n), 2.0 / 3.0);
  // Guard against n^(2/3) landing a hair off an integer for perfect cubes.
  const auto lo = static_cast<std::size_t>(std::ceil(a - 1e-9));
  const auto hi = static_cast<std::size_t>(std::floor(2.0 * a + 1e-9));
  return {lo, hi};
}

StructureFunctionAccumulator::StructureFunctionAccumulator(std::size_t max_lag,
                                                           std::size_t blocks_per_batch)
    : max_lag_(max_lag), blocks_per_batch_(blocks_per_batch) {
  if (max_lag == 0) throw ConfigError("structure function needs a positive maximal lag");
  total_ = open_ = empty_batch();
}

StructureFunctionAccumulator::Batch StructureFunctionAccumulator::empty_batch() const {
  return {std::vector<double>(max_lag_ + 1, 0.0), std::vector<std::uint64_t>(max_lag_ + 1, 0)};
}

void StructureFunctionAccumulator::add_into(Batch& into, const Batch& from) {
  for (std::size_t j = 0; j < into.sums.size(); ++j) {
    into.sums[j] += from.sums[j];
    into.counts[j] += from.counts[j];
  }
}

void StructureFunctionAccumulator::push_series_block(std::span<const double> series) {
  if (series.size() != max_lag_ + 1) {
    throw ConfigError("structure-function block must hold max_lag + 1 points");
  }
  for (std::size_t j = 0; j <= max_lag_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i + j <= max_lag_; ++i) {
      const double d = series[i] - series[i + j];
      s += d * d;
    }
    const std::uint64_t c = max_lag_ + 1 - j;
    open_.sums[j] += s;
    open_.counts[j] += c;
    total_.sums[j] += s;
    total_.counts[j] += c;
  }
  ++blocks_;
  if (blocks_per_batch_ != 0 && ++open_blocks_ == blocks_per_batch_) end_batch();
}

void StructureFunctionAccumulator::end_batch() {
  if (open_.counts[0] == 0) return;
  closed_.push_back(std::move(open_));
  open_ = empty_batch();
  open_blocks_ = 0;
}

void StructureFunctionAccumulator::merge(const StructureFunctionAccumulator& other) {
  if (other.max_lag_ != max_lag_) throw ConfigError("merging structure functions of different T");
  end_batch();
  closed_.insert(closed_.end(), other.closed_.begin(), other.closed_.end());
  if (other.open_.counts[0] != 0) closed_.push_back(other.open_);
  add_into(total_, other.total_);
  blocks_ += other.blocks_;
}

StructureFunctionAccumulator StructureFunctionAccumulator::from_batches(
    std::size_t max_lag, std::vector<Batch> batches) {
  StructureFunctionAccumulator acc(max_lag);
  for (auto& b : batches) {
    if (b.sums.size() != max_lag + 1 || b.counts.size() != max_lag + 1) {
      throw FormatError("structure-function batch has the wrong number of lags");
    }
    add_into(acc.total_, b);
    acc.blocks_ += static_cast<std::size_t>(b.counts[max_lag]);
    acc.closed_.push_back(std::move(b));
  }
  return acc;
}

std::vector<double> StructureFunctionAccumulator::structure() const {
  if (blocks_ == 0) throw InsufficientData("structure function: no blocks");
  std::vector<double> s(max_lag_ + 1);
  for (std::size_t j = 0; j <= max_lag_; ++j) {
    s[j] = total_.sums[j] / static_cast<double>(total_.counts[j]);
  }
  return s;
}

double StructureFunctionAccumulator::plateau_of(const Batch& b, std::size_t lo,
                                                std::size_t hi) const {
  double acc = 0.0;
  for (std::size_t j = lo; j <= hi; ++j) acc += 0.5 * b.sums[j] / static_cast<double>(b.counts[j]);
  return acc / static_cast<double>(hi - lo + 1);
}

PlateauEstimate StructureFunctionAccumulator::plateau_variance(std::size_t n) const {
  if (blocks_ == 0) throw InsufficientData("structure function: no blocks");
  const auto [lo, hi] = plateau_window(n);
  if (hi > max_lag_ || lo > hi) {
    throw InsufficientData("structure function: maximal lag is below 2 n^(2/3)");
  }
  PlateauEstimate est{plateau_of(total_, lo, hi), kNaN, lo, hi};
  if (closed_.size() >= 2) {
    const double k = static_cast<double>(closed_.size());
    double mean = 0.0, sq = 0.0;
    for (const auto& b : closed_) mean += plateau_of(b, lo, hi);
    mean /= k;
    for (const auto& b : closed_) sq += std::pow(plateau_of(b, lo, hi) - mean, 2);
    est.std_error = std::sqrt(sq / (k - 1) / k);
  }
  return est;
}

CovarianceCurve StructureFunctionAccumulator::covariance_curve(std::size_t n,
                                                               const Coefficients& coeffs) const {
  const double scale = cbrt_scale(n, coeffs);
  const double var_unit = scale * scale;
  const PlateauEstimate plateau = plateau_variance(n);
  const std::vector<double> s = structure();

  std::vector<double> batch_plateau;
  for (const auto& b : closed_) batch_plateau.push_back(plateau_of(b, plateau.lo, plateau.hi));
  const double k = static_cast<double>(closed_.size());

  CovarianceCurve curve;
  curve.reserve(max_lag_ + 1);
  for (std::size_t j = 0; j <= max_lag_; ++j) {
    CovarianceRow row;
    row.t_resc = coeffs.A_t * static_cast<double>(j) / (2.0 * var_unit);
    row.cov_resc = (plateau.value - 0.5 * s[j]) / var_unit;
    if (closed_.size() >= 2) {
      double mean = 0.0, sq = 0.0;
      std::vector<double> per(closed_.size());
      for (std::size_t b = 0; b < closed_.size(); ++b) {
        per[b] = batch_plateau[b] -
                 0.5 * closed_[b].sums[j] / static_cast<double>(closed_[b].counts[j]);
        mean += per[b];
      }
      mean /= k;
      for (const double x : per) sq += (x - mean) * (x - mean);
      row.std_error = std::sqrt(sq / (k - 1) / k) / var_unit;
    }
    curve.push_back(row);
  }
  return curve;
}

}  // namespace toom
