#include "toom/ring_check.hpp"

#include <bit>
#include <cmath>

#include "toom/coefficients.hpp"
#include "toom/error.hpp"

namespace toom {
namespace {

// P[k][b] = sum of the spins of sites 1..b in lane k (P[k][0] = 0).
using Prefix = std::vector<std::vector<std::int32_t>>;

Prefix prefix_magnetization(const SpinLattice& lattice) {
  const auto w = lattice.words();
  const std::size_t n = w.size();
  Prefix p(kLanes, std::vector<std::int32_t>(n, 0));
  for (int k = 0; k < kLanes; ++k) {
    std::int32_t acc = 0;
    for (std::size_t b = 1; b < n; ++b) {
      acc += ((w[b] >> k) & 1u) ? -1 : 1;
      p[k][b] = acc;
    }
  }
  return p;
}

struct Moments2 {
  double n = 0, s1 = 0, s2 = 0;
  void add(double x) {
    n += 1;
    s1 += x;
    s2 += x * x;
  }
  void merge(const Moments2& o) {
    n += o.n;
    s1 += o.s1;
    s2 += o.s2;
  }
  double mean() const { return s1 / n; }
  double variance() const { return s2 / n - mean() * mean(); }
};

ValueWithError batch_means(const std::vector<double>& per_batch) {
  const double k = static_cast<double>(per_batch.size());
  double mean = 0.0, sq = 0.0;
  for (const double x : per_batch) mean += x;
  mean /= k;
  for (const double x : per_batch) sq += (x - mean) * (x - mean);
  return {mean, k > 1 ? std::sqrt(sq / (k - 1) / k) : std::nan("")};
}

}  // namespace

void RingCheckConfig::validate() const {
  const ModelParams params(lambda);
  (void)params;
  if (size < 2) throw ConfigError("ring needs N >= 2");
  if (!(std::abs(mu) < 1.0)) throw DomainError("ring magnetization must satisfy |mu| < 1");
  if (!(duration > 0.0) || replicas == 0) throw ConfigError("duration and replicas must be positive");
  if (max_lag == 0 || max_lag >= size) throw ConfigError("max_lag must lie in [1, N)");
  if (!(snapshot_interval > 0.0) || snapshot_interval > duration) {
    throw ConfigError("snapshot interval must lie in (0, duration]");
  }
  if (!(variance_window > 0.0) || variance_window > duration) {
    throw ConfigError("variance window must lie in (0, duration]");
  }
  if (batches < 2) throw ConfigError("need at least two batches");
  const double steps = duration / (variance_window / 4.0);
  if (std::abs(steps - std::round(steps)) > 1e-9 || std::round(steps) < 4 * static_cast<double>(batches)) {
    throw ConfigError("duration must be a multiple of variance_window / 4 with at least 4 windows per batch");
  }
}

RingCheckReport run_ring_check(const RingCheckConfig& cfg) {
  cfg.validate();
  const ModelParams params(cfg.lambda);
  RingCheckReport rep;
  rep.theory_current = spin_current(cfg.mu, params);
  {
    const double h = 1e-6;
    const double d = (spin_current(cfg.mu + h, params) - spin_current(cfg.mu - h, params)) / (2 * h);
    rep.theory_rate = (1.0 - cfg.mu * cfg.mu) * std::abs(d);
  }

  const std::size_t n = cfg.size;
  const double quarter = cfg.variance_window / 4.0;
  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / quarter));
  const std::size_t steps_per_batch = steps / cfg.batches;
  const auto snaps = static_cast<std::size_t>(std::floor(cfg.duration / cfg.snapshot_interval));

  // Lanes start from independent Bernoulli fills, so their magnetizations
  // differ and each lane carries its own mean current. Time batches inside one
  // word cannot see that spread; with two or more words each word is a batch.
  const bool by_replica = cfg.replicas >= 2;
  TwoPointCorrelation corr(0, n, cfg.max_lag,
                           by_replica ? snaps : std::max<std::size_t>(1, snaps / cfg.batches));
  const std::size_t nb = by_replica ? cfg.replicas : cfg.batches;
  std::vector<double> batch_current(nb, 0.0), batch_tracked(nb, 0.0), batch_quarters(nb, 0.0);
  std::vector<std::array<Moments2, 3>> batch_growth(nb);
  const double density = 0.5 * (1.0 - cfg.mu);

  for (std::size_t r = 0; r < cfg.replicas; ++r) {
    ToomEngine engine = ToomEngine::ring(n, params, cfg.seed, density, r, cfg.mode);
    const LaneValues m0 = engine.magnetizations();
    engine.start_current(0);
    // History of the last four quarter-window boundaries.
    std::vector<Prefix> prefix{prefix_magnetization(engine.lattice())};
    std::vector<LaneValues> tally{engine.current().counts};
    std::size_t next_snap = 1;

    for (std::size_t q = 1; q <= steps; ++q) {
      const double t_end = static_cast<double>(q) * quarter;
      while (next_snap <= snaps && static_cast<double>(next_snap) * cfg.snapshot_interval <= t_end) {
        rep.events += engine.advance_until(static_cast<double>(next_snap) * cfg.snapshot_interval);
        corr.push(engine.lattice());
        ++next_snap;
      }
      rep.events += engine.advance_until(t_end);
      prefix.push_back(prefix_magnetization(engine.lattice()));
      tally.push_back(engine.current().counts);
      if (prefix.size() > 5) {
        prefix.erase(prefix.begin());
        tally.erase(tally.begin());
      }
      const std::size_t batch =
          by_replica ? r : std::min((q - 1) / steps_per_batch, cfg.batches - 1);
      batch_quarters[batch] += 1.0;
      const std::size_t last = prefix.size() - 1;

      // Current across bond b over the last quarter: J_0 - (P_b(end) - P_b(start)).
      double sum = 0.0, tracked = 0.0;
      for (int k = 0; k < kLanes; ++k) {
        const double j0 = static_cast<double>(tally[last][k] - tally[last - 1][k]);
        tracked += j0;
        for (std::size_t b = 0; b < n; ++b) sum += j0 - (prefix[last][k][b] - prefix[last - 1][k][b]);
      }
      batch_current[batch] += sum / (static_cast<double>(n) * kLanes * quarter);
      batch_tracked[batch] += tracked / (kLanes * quarter);

      // Windows of 1, 2 and 4 quarters ending now (non-overlapping for each length).
      for (int g = 0; g < 3; ++g) {
        const std::size_t len = std::size_t{1} << g;
        if (q % len != 0 || last < len) continue;
        Moments2& mom = batch_growth[batch][g];
        for (int k = 0; k < kLanes; ++k) {
          const double j0 = static_cast<double>(tally[last][k] - tally[last - len][k]);
          for (std::size_t b = 0; b < n; ++b) {
            mom.add(j0 - (prefix[last][k][b] - prefix[last - len][k][b]));
          }
        }
      }
    }
    const LaneValues m1 = engine.magnetizations();
    const LaneValues recount = lane_magnetizations(engine.lattice());
    for (int k = 0; k < kLanes; ++k) {
      rep.magnetization_drift = std::max(rep.magnetization_drift, std::abs(m1[k] - m0[k]));
      rep.magnetization_drift = std::max(rep.magnetization_drift, std::abs(recount[k] - m0[k]));
    }
  }

  for (std::size_t b = 0; b < nb; ++b) {
    batch_current[b] /= batch_quarters[b];
    batch_tracked[b] /= batch_quarters[b];
  }
  rep.current = batch_means(batch_current);
  rep.tracked_bond_current = batch_means(batch_tracked);
  rep.correlations = corr.table();

  Moments2 pooled[3];
  for (int g = 0; g < 3; ++g) {
    std::vector<double> per;
    for (const auto& bg : batch_growth) {
      if (bg[g].n > 0) per.push_back(bg[g].variance());
      pooled[g].merge(bg[g]);
    }
    const double window = quarter * static_cast<double>(1 << g);
    VarianceGrowthRow row;
    row.window = window;
    row.variance = {pooled[g].variance(), batch_means(per).std_error};
    row.rate = {row.variance.value / window, row.variance.std_error / window};
    rep.growth.push_back(row);
  }
  return rep;
}

}  // namespace toom
