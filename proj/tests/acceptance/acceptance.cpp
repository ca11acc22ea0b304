// Acceptance runner: `toom_acceptance <k>` evaluates criterion k (1-9) and
// prints one PASS / FAIL / SKIP line for it, followed by indented detail lines.
// Exit status: 0 pass, 1 fail, 77 skip, 2 usage error.
//
// Long simulation outputs are cached under TOOM_ACCEPTANCE_DIR (default: the
// working directory) and reused when their stored configuration matches.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "../support/scalar_toom.hpp"
#include "toom/airy1.hpp"
#include "toom/coefficients.hpp"
#include "toom/compare.hpp"
#include "toom/error.hpp"
#include "toom/estimators.hpp"
#include "toom/lattice.hpp"
#include "toom/ring_check.hpp"
#include "toom/simulate.hpp"
#include "toom/tracy_widom.hpp"

namespace fs = std::filesystem;
using namespace toom;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kSkip = 77;

const auto g_start = std::chrono::steady_clock::now();

double elapsed() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - g_start).count();
}

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Collects the individual checks of one criterion and prints the verdict.
class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  bool check(const std::string& name, bool pass, const std::string& detail) {
    lines_.push_back(std::string("    ") + (pass ? "ok   " : "FAIL ") + name + ": " + detail);
    pass_ = pass_ && pass;
    return pass;
  }

  /// |value - target| <= tol.
  bool near(const std::string& name, double value, double target, double tol) {
    const bool pass = std::isfinite(value) && std::abs(value - target) <= tol;
    return check(name, pass, num(value) + " vs " + num(target) + " +- " + num(tol));
  }

  /// |value - target| <= sigma * err.
  bool within_sigma(const std::string& name, double value, double err, double target, double sigma) {
    const bool pass = std::isfinite(err) && std::abs(value - target) <= sigma * err;
    return check(name, pass,
                 num(value) + " +- " + num(err) + " vs " + num(target) + " (" +
                     num(std::abs(value - target) / err, 3) + " sigma, limit " + num(sigma, 2) + ")");
  }

  void info(const std::string& text) { lines_.push_back("    info " + text); }

  int finish() const {
    const double seconds = elapsed();
    std::cout << "criterion " << id_ << ": " << (pass_ ? "PASS" : "FAIL") << "  " << title_ << "  ["
              << num(seconds, 3) << " s]\n";
    for (const auto& l : lines_) std::cout << l << '\n';
    return pass_ ? kPass : kFail;
  }

 private:
  int id_;
  std::string title_;
  bool pass_ = true;
  std::vector<std::string> lines_;
};

fs::path cache_root() {
  const char* dir = std::getenv("TOOM_ACCEPTANCE_DIR");
  return dir ? fs::path(dir) : fs::current_path();
}

void log_line(const std::string& line) { std::cerr << line << '\n'; }

// Runs (or reuses, or resumes) a simulation whose stored configuration matches.
void ensure_run(const RunConfig& config) {
  const fs::path dir = config.output_dir;
  const fs::path stored = dir / "config.json";
  auto normalized = [](RunConfig c) {
    c.threads = 0;
    c.checkpoint_interval = 0;
    return to_json(c);
  };
  bool same = false;
  if (fs::exists(stored)) {
    try {
      same = normalized(load_run_config(stored)) == normalized(config);
    } catch (const std::exception&) {
      same = false;
    }
  }
  const bool done = same && fs::exists(dir / "samples.csv") &&
                    (config.struct_blocks == 0 || fs::exists(dir / "structure.csv"));
  if (done) {
    log_line("reusing " + dir.string());
    return;
  }
  SimulateOptions opt;
  opt.resume = same && fs::exists(dir / "work");
  opt.log = log_line;
  if (!same) fs::remove_all(dir);
  run_simulation(config, opt);
}

// ---------------------------------------------------------------------------

int coefficient_identities() {
  Criterion c(1, "coefficient identities over 200 lambda values");
  double worst_current = 0, worst_identity = 0, worst_fd = 0, worst_zero_g = 0;
  for (int i = 0; i < 200; ++i) {
    const double lambda = std::min(1.0, std::pow(10.0, -3.0 + 3.0 * i / 199.0));
    const ModelParams p(lambda);
    const Coefficients k = kpz_coefficients(p);
    worst_current = std::max(worst_current, std::abs(spin_current(k.mu0, p)));
    auto rel = [](double a, double b) {
      const double s = std::max(std::abs(a), std::abs(b));
      return s == 0.0 ? 0.0 : std::abs(a - b) / s;
    };
    worst_identity = std::max({worst_identity, std::abs(k.v * k.v_t - 1.0), rel(k.G, -k.G_t * k.v * k.v * k.v),
                               rel(k.A_t, k.A * k.v), rel(k.Gamma_t, std::abs(k.G_t) * k.A_t * k.A_t)});
    // Five-point stencils with a step scaled to the distance from mu = 1,
    // where the current's derivatives blow up.
    const double h = 1e-2 * (1.0 - k.mu0);
    auto J = [&](double x) { return spin_current(k.mu0 + x * h, p); };
    const double d1 = (J(-2) - 8 * J(-1) + 8 * J(1) - J(2)) / (12 * h);
    const double d2 = (-J(-2) + 16 * J(-1) - 30 * J(0) + 16 * J(1) - J(2)) / (12 * h * h);
    worst_fd = std::max(worst_fd, rel(d1, k.v));
    if (k.G == 0.0) {
      worst_zero_g = std::max(worst_zero_g, std::abs(d2));  // lambda = 1: G vanishes exactly
    } else {
      worst_fd = std::max(worst_fd, rel(d2, k.G));
    }
  }
  c.check("J(mu0) = 0", worst_current <= 1e-12, "max |J| " + num(worst_current) + " (limit 1e-12)");
  c.check("v vt = 1, G = -Gt v^3, At = A v, Gammat = |Gt| At^2", worst_identity <= 1e-12,
          "max relative residual " + num(worst_identity) + " (limit 1e-12)");
  c.check("finite differences of J reproduce v and G", worst_fd <= 1e-6,
          "max relative deviation " + num(worst_fd) + " (limit 1e-6)");
  c.check("J'' vanishes at lambda = 1", worst_zero_g <= 1e-6, "|J''| " + num(worst_zero_g));
  return c.finish();
}

int tracy_widom_moments() {
  Criterion c(2, "GOE edge-law moments (m = 60, L = 12)");
  const rmt::Moments m = rmt::tw_goe_moments({60, 12.0});
  c.near("mean", m.mean, -0.6033, 0.0015);
  c.near("variance", m.variance, 0.4080, 0.0015);
  c.near("skewness", m.skewness, 0.2931, 0.003);
  c.near("kurtosis", m.kurtosis, 3.165, 0.005);
  c.info("literature Var(xi_GOE) / 4 = 1.6077810345 / 4 = " + num(1.6077810345 / 4, 10) +
         "; computed " + num(m.variance, 10) + "; total mass " + num(m.mass, 12));
  return c.finish();
}

int airy1_theory() {
  Criterion c(3, "Airy1 joint law and covariance g1");
  // Coherence of the joint cdf.
  double marg = 0, degenerate = 0, frechet = 0, monotone = 0;
  for (const double t : {0.0, 0.25, 0.75, 1.5}) {
    for (double s1 = -3.0; s1 <= 1.5 + 1e-9; s1 += 0.75) {
      const double f1 = rmt::tw_goe_cdf(s1);
      marg = std::max({marg, std::abs(rmt::airy1_joint_cdf(t, s1, 8.0) - f1),
                       std::abs(rmt::airy1_joint_cdf(t, 8.0, s1) - f1)});
      double prev = 0.0;
      for (double s2 = -3.0; s2 <= 1.5 + 1e-9; s2 += 0.75) {
        const double f2 = rmt::tw_goe_cdf(s2);
        const double j = rmt::airy1_joint_cdf(t, s1, s2);
        if (t == 0.0) degenerate = std::max(degenerate, std::abs(j - std::min(f1, f2)));
        frechet = std::max({frechet, j - std::min(f1, f2), std::max(0.0, f1 + f2 - 1.0) - j});
        monotone = std::max(monotone, prev - j);
        prev = j;
      }
    }
  }
  c.check("marginalization", marg <= 1e-6, "max deviation " + num(marg) + " (limit 1e-6)");
  c.check("equal-time joint law", degenerate <= 1e-6, "max deviation " + num(degenerate) + " (limit 1e-6)");
  c.check("Frechet bounds", frechet <= 1e-6, "max violation " + num(frechet) + " (limit 1e-6)");
  c.check("joint cdf nondecreasing in s2", monotone <= 1e-6, "max decrease " + num(monotone));

  const auto curve = rmt::g1_curve(1.5, 30);
  c.near("g1(0)", curve.front().g1, 0.4080, 0.002);
  double rise = -1.0;
  for (std::size_t k = 1; k < curve.size(); ++k) rise = std::max(rise, curve[k].g1 - curve[k - 1].g1);
  c.check("g1 decreasing on [0, 1.5]", rise <= 1e-4, "max increase between rows " + num(rise) + " (limit 1e-4)");
  c.info("g1(0) - variance of the edge law = " + num(curve.front().g1 - rmt::tw_goe_moments().variance));
  std::ostringstream rows;
  for (std::size_t k = 0; k < curve.size(); k += 6) rows << " g1(" << num(curve[k].t, 3) << ")=" << num(curve[k].g1, 5);
  rows << " g1(1.5)=" << num(curve.back().g1, 5);
  c.info(rows.str());
  return c.finish();
}

int ring_physics() {
  Criterion c(4, "ring current, correlations and current-variance growth (N = 4096, lambda = 1/8)");
  RingCheckConfig cfg;
  cfg.replicas = 8;
  cfg.seed = 2024;
  const RingCheckReport zero = run_ring_check(cfg);
  c.near("current at mu = 0", zero.current.value, -1.75, 0.02);
  c.info("mu = 0: current " + num(zero.current.value) + " +- " + num(zero.current.std_error) +
         ", bond (0,1) alone " + num(zero.tracked_bond_current.value));

  cfg.mu = stationary_magnetization(ModelParams(cfg.lambda));
  cfg.seed = 2025;
  const RingCheckReport stat = run_ring_check(cfg);
  c.within_sigma("current at mu0", stat.current.value, stat.current.std_error, 0.0, 3.0);
  for (const auto& row : stat.correlations) {
    c.within_sigma("correlation at lag " + std::to_string(row.lag), row.value, row.std_error, 0.0, 3.0);
  }
  const VarianceGrowthRow& g = stat.growth.back();
  c.near("variance growth rate (window " + num(g.window) + ")", g.rate.value, 8.0 * std::sqrt(cfg.lambda),
         0.05 * 8.0 * std::sqrt(cfg.lambda));
  for (const auto& row : stat.growth) {
    c.info("window " + num(row.window) + ": rate " + num(row.rate.value) + " +- " + num(row.rate.std_error));
  }
  c.check("magnetization conserved", zero.magnetization_drift == 0 && stat.magnetization_drift == 0,
          "max lane drift " + std::to_string(std::max(zero.magnetization_drift, stat.magnetization_drift)));
  return c.finish();
}

// Desk-scale run shared by criteria 5 and 7.
RunConfig desk_config() {
  RunConfig cfg;
  cfg.lambda = 0.125;
  cfg.n = 2000;
  cfg.seed = 20260101;
  cfg.warmup_time = 20.0 * 2000;
  cfg.sample_period = 100.0;
  cfg.num_samples = 1954;  // 8 * 1954 * 64 >= 10^6 lane samples
  cfg.struct_blocks = 125;
  cfg.struct_max_lag = 477;  // ceil(3 n^(2/3)): lags beyond 2 n^(2/3) for the tail check
  cfg.replicas = 8;
  cfg.threads = 0;
  cfg.checkpoint_interval = 120;
  cfg.output_dir = cache_root() / "desk_n2000";
  return cfg;
}

int desk_cumulants() {
  Criterion c(5, "desk-scale interface run, n = 2000, lambda = 1/8");
  const RunConfig cfg = desk_config();
  ensure_run(cfg);
  const auto samples = read_sample_values(fs::path(cfg.output_dir) / "samples.csv");
  c.check("sample count", samples.size() >= 1'000'000, std::to_string(samples.size()) + " lane samples");

  CompareOptions opt;
  opt.n = cfg.n;
  const ComparisonReport rep = compare_run(samples, nullptr, opt);
  const auto& v = rep.cumulants.value;
  const auto& e = rep.cumulants.error;
  c.near("mean", v.mean, -0.452, 0.04);
  c.check("variance in [0.42, 0.46]", v.variance >= 0.42 && v.variance <= 0.46, num(v.variance));
  c.near("skewness (10%)", v.skewness, 0.2931, 0.1 * 0.2931);
  c.near("kurtosis (2%)", v.kurtosis, 3.165, 0.02 * 3.165);
  c.info("batch-means errors: mean " + num(e.mean) + ", variance " + num(e.variance) + ", skewness " +
         num(e.skewness) + ", kurtosis " + num(e.kurtosis));
  c.info("sign-mirrored statistics -(M - mu0 n) / (Gamma n)^(1/3): mean " + num(-v.mean) + ", skewness " +
         num(-v.skewness));
  c.info("density sup |empirical - GOE edge law| = " + num(rep.density_sup_diff));
  return c.finish();
}

int paper_scale() {
  Criterion c(6, "paper-scale run, n = 10^4, lambda = 1/8, >= 5e6 samples");
  if (std::getenv("TOOM_ACCEPTANCE_EXTENDED") == nullptr) {
    std::cout << "criterion 6: SKIP  paper-scale run (set TOOM_ACCEPTANCE_EXTENDED=1; needs days of CPU time)\n";
    return kSkip;
  }
  RunConfig cfg;
  cfg.lambda = 0.125;
  cfg.n = 10000;
  cfg.seed = 10000;
  cfg.num_samples = 1221;  // 64 replicas * 1221 * 64 >= 5 * 10^6
  cfg.replicas = 64;
  cfg.threads = 0;
  cfg.checkpoint_interval = 600;
  cfg.output_dir = cache_root() / "paper_n10000";
  ensure_run(cfg);
  const auto samples = read_sample_values(fs::path(cfg.output_dir) / "samples.csv");
  CompareOptions opt;
  opt.n = cfg.n;
  const ComparisonReport rep = compare_run(samples, nullptr, opt);
  const auto& v = rep.cumulants.value;
  const auto& e = rep.cumulants.error;
  c.within_sigma("mean", v.mean, e.mean, -0.5198, 3.0);
  c.within_sigma("variance", v.variance, e.variance, 0.4335, 3.0);
  c.within_sigma("skewness", v.skewness, e.skewness, 0.2657, 3.0);
  c.within_sigma("kurtosis", v.kurtosis, e.kurtosis, 3.154, 3.0);
  return c.finish();
}

int desk_covariance() {
  Criterion c(7, "covariance curve versus g1, n = 2000");
  const RunConfig cfg = desk_config();
  ensure_run(cfg);
  const fs::path dir = cfg.output_dir;
  const auto samples = read_sample_values(dir / "samples.csv");
  const auto structure = read_structure(dir / "structure.csv");
  CompareOptions opt;
  opt.n = cfg.n;
  opt.g1_points = 31;  // spacing 0.05 in t_resc
  const ComparisonReport rep = compare_run(samples, &structure, opt);
  for (const Check& k : rep.checks) {
    if (k.name != "covariance_vs_g1" && k.name != "covariance_tail") continue;
    c.check(k.name == "covariance_vs_g1" ? "pointwise |cov - g1| <= 3 sigma + 0.02 on t_resc <= 1"
                                         : "|cov| <= 3 sigma + 1e-3 for lags >= 2 n^(2/3)",
            k.pass,
            "worst row: " + num(k.empirical) + " +- " + num(k.std_error) + " vs " + num(k.target) +
                " (|dev| " + num(k.deviation) + ", tol " + num(k.tolerance) + ")");
  }
  if (rep.plateau) {
    c.info("plateau variance (rescaled) " + num(rep.plateau->value) + " +- " + num(rep.plateau->std_error) +
           " over lags [" + std::to_string(rep.plateau->lo) + ", " + std::to_string(rep.plateau->hi) + "]");
  }
  std::ostringstream rows;
  double next = 0.0;
  for (const auto& r : rep.covariance) {
    if (r.t_resc > 1.0 + 1e-9) break;
    if (r.t_resc + 1e-9 >= next) {
      rows << " t=" << num(r.t_resc, 3) << ":" << num(r.cov_resc, 4) << "/" << num(r.g1, 4);
      next += 0.25;
    }
  }
  c.info("cov/g1 at" + rows.str());
  return c.finish();
}

int engine_correctness() {
  Criterion c(8, "engine property suite");
  int mismatches = 0;
  for (const std::size_t n : {2u, 17u, 64u}) {
    mismatches += testing::oracle_mismatches(Topology::HalfLine, n, 10 + n, 100000);
    mismatches += testing::oracle_mismatches(Topology::Ring, n, 20 + n, 100000);
  }
  c.check("scalar-oracle trajectories (n = 2, 17, 64; 1e5 events; both topologies)", mismatches == 0,
          std::to_string(mismatches) + " diverging lanes");

  {
    auto engine = ToomEngine::ring(1000, ModelParams(0.125), 3, 0.3);
    const LaneValues before = lane_magnetizations(engine.lattice());
    bool same = true;
    for (int k = 0; k < 10; ++k) {
      engine.advance_until(engine.clock() + 100.0);
      same = same && lane_magnetizations(engine.lattice()) == before;
    }
    c.check("ring magnetization conserved exactly", same, "1e6 events, checked every 1e5");
  }

  {
    const double lambda = 0.125;
    ToomEngine engine(SpinLattice(Topology::HalfLine, 1), ModelParams(lambda), RngState(5));
    std::vector<double> fractions;
    for (int b = 0; b < 40; ++b) {
      double plus = 0, total = 0;
      for (int e = 0; e < 25000; ++e) {
        const Word before = engine.lattice().words()[0];
        const auto rec = engine.attempt_event();
        plus += rec.dt * (kLanes - std::popcount(before));
        total += rec.dt * kLanes;
      }
      fractions.push_back(plus / total);
    }
    const double mean = std::accumulate(fractions.begin(), fractions.end(), 0.0) / 40;
    double ss = 0;
    for (const double f : fractions) ss += (f - mean) * (f - mean);
    c.within_sigma("single-site P(+)", mean, std::sqrt(ss / 39 / 40), 1.0 / (1.0 + lambda), 3.0);
  }

  {
    auto engine = ToomEngine::half_line(1000, ModelParams(0.125), 6);
    const int calls = 10000;
    double s = 0, s2 = 0;
    for (int i = 0; i < calls; ++i) {
      const double k = static_cast<double>(engine.advance_until(engine.clock() + 1.0));
      s += k;
      s2 += k * k;
    }
    const double mean = s / calls, var = s2 / calls - mean * mean;
    c.near("events per unit time (mean)", mean, 1000.0, 3.0 * std::sqrt(1000.0 / calls) * std::sqrt(1000.0));
    c.near("variance / mean of event counts", var / mean, 1.0, 4.0 * std::sqrt(2.0 / calls));
  }

  {
    auto engine = ToomEngine::half_line(500, ModelParams(0.125), 7);
    for (int i = 0; i < 500000; ++i) engine.attempt_event();
    auto copy = ToomEngine::resume(engine.checkpoint(), engine.params());
    for (int i = 0; i < 1000000; ++i) {
      engine.attempt_event();
      copy.attempt_event();
    }
    c.check("checkpoint round trip", copy.lattice() == engine.lattice() && copy.rng() == engine.rng(),
            "identical words, clock and generator after 1e6 further events");
  }
  return c.finish();
}

int finite_size_drift() {
  Criterion c(9, "finite-size drift of the mean towards the GOE edge law");
  const ModelParams params(0.125);
  const Coefficients k = kpz_coefficients(params);
  const double limit = -0.6033;
  std::vector<double> log_n, deficit, weight, mirrored;
  bool monotone = true, mirrored_monotone = true;
  for (const std::size_t n : {125u, 250u, 500u, 1000u}) {
    RunConfig cfg;
    cfg.lambda = 0.125;
    cfg.n = n;
    cfg.seed = 900 + n;
    cfg.warmup_time = 20.0 * static_cast<double>(n);
    // One correlation time of the rescaled process: t_resc = 1.
    cfg.sample_period = std::ceil(2.0 * std::pow(k.Gamma_t * static_cast<double>(n), 2.0 / 3.0) / k.A_t);
    cfg.num_samples = 1024;
    cfg.replicas = 4;
    cfg.threads = 0;
    cfg.checkpoint_interval = 0;
    cfg.output_dir = cache_root() / ("drift_n" + std::to_string(n));
    ensure_run(cfg);
    const auto samples = read_sample_values(fs::path(cfg.output_dir) / "samples.csv");
    CompareOptions opt;
    opt.n = n;
    const auto est = compare_run(samples, nullptr, opt).cumulants;
    const double d = est.value.mean - limit;
    const double dm = -est.value.mean - limit;
    if (!deficit.empty() && !(d < deficit.back())) monotone = false;
    if (!mirrored.empty() && !(dm < mirrored.back())) mirrored_monotone = false;
    c.info("n = " + std::to_string(n) + ": mean " + num(est.value.mean) + " +- " + num(est.error.mean) +
           ", deficit " + num(d) + ", sign-mirrored deficit " + num(dm));
    log_n.push_back(std::log(static_cast<double>(n)));
    deficit.push_back(d);
    mirrored.push_back(dm);
    weight.push_back(est.error.mean);
  }
  // Weighted least-squares slope of log(deficit) against log(n).
  auto slope_of = [&](const std::vector<double>& d) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!(d[i] > 0)) return std::nan("");
      const double w = std::pow(d[i] / weight[i], 2);  // 1 / var(log d)
      const double y = std::log(d[i]);
      sw += w;
      sx += w * log_n[i];
      sy += w * y;
      sxx += w * log_n[i] * log_n[i];
      sxy += w * log_n[i] * y;
    }
    return (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
  };
  const double slope = slope_of(deficit);
  c.check("deficit positive and decreasing in n", monotone && deficit.front() > 0, monotone ? "monotone" : "not monotone");
  c.near("log-log slope of the deficit", slope, -1.0 / 3.0, 0.1);
  c.info("sign-mirrored deficits: " + std::string(mirrored_monotone ? "monotone" : "not monotone") +
         ", slope " + num(slope_of(mirrored)));
  return c.finish();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: toom_acceptance <criterion 1-9>\n";
    return 2;
  }
  const int id = std::atoi(argv[1]);
  const std::vector<std::function<int()>> criteria = {
      coefficient_identities, tracy_widom_moments, airy1_theory,      ring_physics,      desk_cumulants,
      paper_scale,            desk_covariance,     engine_correctness, finite_size_drift};
  if (id < 1 || id > static_cast<int>(criteria.size())) {
    std::cerr << "unknown criterion " << argv[1] << '\n';
    return 2;
  }
  try {
    return criteria[id - 1]();
  } catch (const std::exception& e) {
    std::cout << "criterion " << id << ": FAIL  error: " << e.what() << '\n';
    return kFail;
  }
}
