// Command-line driver: coefficient report, half-line simulation, ring
// validation, theory tables and simulation-versus-theory comparison.
//
// Exit codes: 0 ok, 1 tolerance failure in compare, 2 configuration or domain
// error, 3 I/O or input-format error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "toom/airy1.hpp"
#include "toom/coefficients.hpp"
#include "toom/compare.hpp"
#include "toom/csv.hpp"
#include "toom/error.hpp"
#include "toom/ring_check.hpp"
#include "toom/run_config.hpp"
#include "toom/simulate.hpp"
#include "toom/tracy_widom.hpp"

namespace fs = std::filesystem;
using namespace toom;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

void log_line(const std::string& msg) { std::cerr << msg << '\n'; }

std::string fmt(double x) { return format_number(x); }

int cmd_coeffs(double lambda, const std::string& csv_path) {
  const ModelParams params(lambda);
  const Coefficients c = kpz_coefficients(params);
  const double closed = kpz_amplitude_closed_form(params);
  auto rel = [](double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
  };
  const std::pair<const char*, double> rows[] = {
      {"lambda", lambda},
      {"mu0", c.mu0},
      {"v", c.v},
      {"G", c.G},
      {"A", c.A},
      {"v_t", c.v_t},
      {"G_t", c.G_t},
      {"A_t", c.A_t},
      {"Gamma_t", c.Gamma_t},
      {"residual_J_mu0", std::abs(spin_current(c.mu0, params))},
      {"residual_v_vt", std::abs(c.v * c.v_t - 1.0)},
      {"residual_G", rel(c.G, -c.G_t * c.v * c.v * c.v)},
      {"residual_A_t", rel(c.A_t, c.A * c.v)},
      {"residual_Gamma_t", rel(c.Gamma_t, closed)},
  };
  std::cout << "name,value\n";
  for (const auto& [name, value] : rows) std::cout << name << ',' << fmt(value) << '\n';
  if (!csv_path.empty()) {
    CsvWriter out(csv_path, {"name", "value"});
    for (const auto& [name, value] : rows) out.row(name, value);
    out.close();
  }
  if (c.degenerate()) {
    std::cerr << "warning: Gamma_t = 0 at lambda = 1; the fluctuation rescaling is degenerate\n";
  }
  return kExitOk;
}

int cmd_theory(const fs::path& out, double s_min, double s_max, int points, double t_max,
               int g1_points, unsigned threads, bool skip_g1) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string());
  const rmt::Moments m = rmt::tw_goe_moments();
  std::cout << "edge law moments: mean " << fmt(m.mean) << " variance " << fmt(m.variance)
            << " skewness " << fmt(m.skewness) << " kurtosis " << fmt(m.kurtosis) << '\n';
  {
    CsvWriter csv(out / "tw_density.csv", {"s", "cdf", "density"});
    for (const auto& r : rmt::tw_goe_table(s_min, s_max, points)) csv.row(r.s, r.cdf, r.density);
    csv.close();
  }
  if (!skip_g1) {
    CsvWriter csv(out / "g1.csv", {"t", "g1"});
    for (const auto& r : rmt::g1_curve(t_max, g1_points, {}, threads)) csv.row(r.t, r.g1);
    csv.close();
  }
  std::cout << "wrote " << out.string() << '\n';
  return kExitOk;
}

int cmd_ring(const RingCheckConfig& cfg, const std::string& out_dir) {
  const RingCheckReport r = run_ring_check(cfg);
  std::cout << "ring N=" << cfg.size << " lambda=" << fmt(cfg.lambda) << " mu=" << fmt(cfg.mu)
            << " duration=" << fmt(cfg.duration) << " replicas=" << cfg.replicas << '\n';
  std::cout << "events " << r.events << ", max magnetization drift " << r.magnetization_drift << '\n';
  std::cout << "current (all bonds) " << fmt(r.current.value) << " +- " << fmt(r.current.std_error)
            << "  theory " << fmt(r.theory_current) << '\n';
  std::cout << "current (bond 0,1)  " << fmt(r.tracked_bond_current.value) << " +- "
            << fmt(r.tracked_bond_current.std_error) << '\n';
  for (const auto& c : r.correlations) {
    std::cout << "corr lag " << c.lag << ": " << fmt(c.value) << " +- " << fmt(c.std_error) << '\n';
  }
  for (const auto& g : r.growth) {
    std::cout << "variance growth window " << fmt(g.window) << ": rate " << fmt(g.rate.value)
              << " +- " << fmt(g.rate.std_error) << "  theory " << fmt(r.theory_rate) << '\n';
  }
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir);
    const fs::path dir = out_dir;
    {
      CsvWriter csv(dir / "current.csv", {"kind", "value", "stderr", "theory"});
      csv.row("all_bonds", r.current.value, r.current.std_error, r.theory_current);
      csv.row("bond_0", r.tracked_bond_current.value, r.tracked_bond_current.std_error,
              r.theory_current);
      csv.close();
    }
    {
      CsvWriter csv(dir / "correlations.csv", {"lag", "value", "stderr"});
      for (const auto& c : r.correlations) csv.row(c.lag, c.value, c.std_error);
      csv.close();
    }
    {
      CsvWriter csv(dir / "growth.csv", {"window", "variance", "variance_err", "rate", "rate_err", "theory"});
      for (const auto& g : r.growth) {
        csv.row(g.window, g.variance.value, g.variance.std_error, g.rate.value, g.rate.std_error,
                r.theory_rate);
      }
      csv.close();
    }
  }
  if (r.magnetization_drift != 0) {
    std::cerr << "error: magnetization not conserved on the ring\n";
    return kExitTolerance;
  }
  return kExitOk;
}

CumulantTargets parse_targets(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_double(item));
  if (v.size() != 4) throw ConfigError("--targets needs mean,variance,skewness,kurtosis");
  return {v[0], v[1], v[2], v[3], "user targets"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toom interface laboratory: simulation and GOE edge-law theory"};
  app.require_subcommand(1);

  // coeffs
  double c_lambda = 0.125;
  std::string c_csv;
  auto* coeffs = app.add_subcommand("coeffs", "Scaling constants and identity residuals");
  coeffs->add_option("--lambda", c_lambda, "rate ratio in (0, 1]")->required();
  coeffs->add_option("--csv", c_csv, "also write name,value CSV here");

  // simulate
  RunConfig run;
  std::string config_path;
  bool resume = false;
  std::optional<std::size_t> halt_after;
  std::string mode_text;
  std::optional<double> lambda_opt, density_opt, warmup_opt, period_opt, ckpt_opt;
  std::optional<std::size_t> n_opt, samples_opt, blocks_opt, lag_opt, replicas_opt, threads_opt;
  std::optional<std::uint64_t> seed_opt;
  std::optional<std::string> out_opt;
  auto* sim = app.add_subcommand("simulate", "Half-line interface run");
  sim->add_option("--config", config_path, "JSON run configuration (flags override it)");
  sim->add_option("--lambda", lambda_opt, "rate ratio in (0, 1]");
  sim->add_option("--n", n_opt, "window size");
  sim->add_option("--seed", seed_opt, "generator seed");
  sim->add_option("--init-density", density_opt, "probability of an initial - spin");
  sim->add_option("--warmup", warmup_opt, "warmup time (default n^2/2)");
  sim->add_option("--period", period_opt, "time between samples (default n)");
  sim->add_option("--samples", samples_opt, "sample times per replica (64 lanes each)");
  sim->add_option("--struct-blocks", blocks_opt, "structure-function blocks per replica");
  sim->add_option("--struct-lag", lag_opt, "structure-function maximal lag T");
  sim->add_option("--replicas", replicas_opt, "replica words");
  sim->add_option("--mode", mode_text, "exact or fast");
  sim->add_option("--out", out_opt, "output directory");
  sim->add_option("--checkpoint-interval", ckpt_opt, "wall-clock seconds between checkpoints");
  sim->add_option("--threads", threads_opt, "worker threads (0: all cores)");
  sim->add_flag("--resume", resume, "continue from the checkpoints in the output directory");
  sim->add_option("--halt-after", halt_after, "stop each replica after this many samples + blocks");

  // ring-check
  RingCheckConfig ring;
  bool use_mu0 = false;
  std::string ring_mode, ring_out;
  auto* rc = app.add_subcommand("ring-check", "Current, correlations and variance growth on the ring");
  rc->add_option("--N", ring.size, "ring size");
  rc->add_option("--lambda", ring.lambda, "rate ratio in (0, 1]");
  rc->add_option("--mu", ring.mu, "magnetization of the Bernoulli state");
  rc->add_flag("--mu0", use_mu0, "use the stationary magnetization mu0(lambda)");
  rc->add_option("--seed", ring.seed, "generator seed");
  rc->add_option("--duration", ring.duration, "run time per replica");
  rc->add_option("--replicas", ring.replicas, "replica words");
  rc->add_option("--max-lag", ring.max_lag, "largest correlation lag");
  rc->add_option("--snapshot", ring.snapshot_interval, "time between correlation snapshots");
  rc->add_option("--window", ring.variance_window, "current-variance window");
  rc->add_option("--batches", ring.batches, "batches for error bars");
  rc->add_option("--mode", ring_mode, "exact or fast");
  rc->add_option("--out", ring_out, "directory for CSV output");

  // theory
  std::string th_out = "theory";
  double s_min = -8.0, s_max = 6.0, t_max = 1.5;
  int points = 281, g1_points = 30;
  unsigned th_threads = 0;
  bool skip_g1 = false;
  auto* th = app.add_subcommand("theory", "GOE edge-law density and g1 tables");
  th->add_option("--out", th_out, "output directory");
  th->add_option("--s-min", s_min, "left end of the density grid");
  th->add_option("--s-max", s_max, "right end of the density grid");
  th->add_option("--points", points, "density grid points");
  th->add_option("--t-max", t_max, "largest g1 time");
  th->add_option("--g1-points", g1_points, "g1 grid points");
  th->add_option("--threads", th_threads, "worker threads for g1 (0: all cores)");
  th->add_flag("--skip-g1", skip_g1, "only the density table");

  // compare
  std::string run_dir, samples_path, structure_path, cmp_out, targets_text;
  CompareOptions cmp;
  std::optional<double> cmp_lambda;
  std::optional<std::size_t> cmp_n;
  bool no_structure = false;
  auto* cp = app.add_subcommand("compare", "Simulation versus theory report");
  cp->add_option("--run", run_dir, "simulate output directory");
  cp->add_option("--samples", samples_path, "samples.csv (default RUN/samples.csv)");
  cp->add_option("--structure", structure_path, "structure.csv (default RUN/structure.csv if present)");
  cp->add_flag("--no-structure", no_structure, "skip the covariance comparison");
  cp->add_option("--lambda", cmp_lambda, "rate ratio (default from RUN/config.json)");
  cp->add_option("--n", cmp_n, "window size (default from RUN/config.json)");
  cp->add_option("--out", cmp_out, "report directory (default RUN/report)");
  cp->add_option("--density-tol", cmp.density_tol, "largest allowed |empirical - theory| density gap");
  cp->add_option("--sigma", cmp.sigma, "error-bar multiple for cumulant and covariance checks");
  cp->add_option("--bin-width", cmp.min_bin_width, "smallest rescaled bin width");
  cp->add_option("--targets", targets_text, "mean,variance,skewness,kurtosis");
  cp->add_option("--g1-points", cmp.g1_points, "g1 grid points");
  cp->add_option("--cov-allowance", cmp.cov_allowance, "additive slack on the covariance band");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*coeffs) return cmd_coeffs(c_lambda, c_csv);

    if (*sim) {
      if (!config_path.empty()) run = load_run_config(config_path);
      if (lambda_opt) run.lambda = *lambda_opt;
      if (n_opt) run.n = *n_opt;
      if (seed_opt) run.seed = *seed_opt;
      if (density_opt) run.init_density = *density_opt;
      if (warmup_opt) run.warmup_time = *warmup_opt;
      if (period_opt) run.sample_period = *period_opt;
      if (samples_opt) run.num_samples = *samples_opt;
      if (blocks_opt) run.struct_blocks = *blocks_opt;
      if (lag_opt) run.struct_max_lag = *lag_opt;
      if (replicas_opt) run.replicas = *replicas_opt;
      if (!mode_text.empty()) run.mode = parse_time_mode(mode_text);
      if (out_opt) run.output_dir = *out_opt;
      if (ckpt_opt) run.checkpoint_interval = *ckpt_opt;
      if (threads_opt) run.threads = *threads_opt;
      if (resume && config_path.empty()) {
        // Resume from the stored configuration; only scheduling may change.
        RunConfig stored = load_run_config(run.output_dir / "config.json");
        stored.output_dir = run.output_dir;
        if (threads_opt) stored.threads = *threads_opt;
        if (ckpt_opt) stored.checkpoint_interval = *ckpt_opt;
        run = stored;
      }
      SimulateOptions so;
      so.resume = resume;
      so.halt_after = halt_after;
      so.log = log_line;
      const SimulationResult res = run_simulation(run, so);
      if (!res.complete) {
        std::cout << "halted; continue with: simulate --resume --out " << run.output_dir.string() << '\n';
      } else {
        std::cout << "wrote " << res.samples << " samples";
        if (res.blocks) std::cout << " and " << res.blocks << " structure blocks";
        std::cout << " to " << run.output_dir.string() << '\n';
      }
      return kExitOk;
    }

    if (*rc) {
      if (!ring_mode.empty()) ring.mode = parse_time_mode(ring_mode);
      if (use_mu0) ring.mu = stationary_magnetization(ModelParams(ring.lambda));
      return cmd_ring(ring, ring_out);
    }

    if (*th) return cmd_theory(th_out, s_min, s_max, points, t_max, g1_points, th_threads, skip_g1);

    if (*cp) {
      if (run_dir.empty() && samples_path.empty()) throw ConfigError("compare needs --run or --samples");
      const fs::path dir = run_dir;
      if (!run_dir.empty() && !fs::is_directory(dir)) throw IoError("no run directory " + run_dir);
      if (!run_dir.empty() && fs::exists(dir / "config.json")) {
        const RunConfig stored = load_run_config(dir / "config.json");
        cmp.lambda = stored.lambda;
        cmp.n = stored.n;
      }
      if (cmp_lambda) cmp.lambda = *cmp_lambda;
      if (cmp_n) cmp.n = *cmp_n;
      if (cmp.n == 0) throw ConfigError("compare needs --n (or a run directory with config.json)");
      // Reject a degenerate scaling before touching any input file.
      InterfaceScaling::of(cmp.n, kpz_coefficients(ModelParams(cmp.lambda)));
      if (!targets_text.empty()) cmp.targets = parse_targets(targets_text);
      if (samples_path.empty()) samples_path = (dir / "samples.csv").string();
      if (structure_path.empty() && !run_dir.empty() && fs::exists(dir / "structure.csv")) {
        structure_path = (dir / "structure.csv").string();
      }
      if (cmp_out.empty()) cmp_out = run_dir.empty() ? "report" : (dir / "report").string();

      const std::vector<std::int64_t> samples = read_sample_values(samples_path);
      std::optional<StructureFunctionAccumulator> structure;
      if (!no_structure && !structure_path.empty()) structure = read_structure(structure_path);
      const ComparisonReport report =
          compare_run(samples, structure ? &*structure : nullptr, cmp);
      write_report(report, cmp_out);
      std::cout << summary_text(report);
      return report.pass ? kExitOk : kExitTolerance;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitConfig;
}
