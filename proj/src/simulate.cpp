#include "toom/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "toom/csv.hpp"
#include "toom/error.hpp"

namespace toom {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One replica word: its engine, the partial samples file and its share of the
// structure function. Progress is the engine clock plus the two counters.
class Replica {
 public:
  Replica(const RunConfig& config, std::size_t index, fs::path work)
      : config_(config), index_(index), work_(std::move(work)),
        structure_(config.struct_blocks > 0 ? config.max_lag() : 1) {}

  fs::path part_path() const { return work_ / ("replica_" + std::to_string(index_) + ".csv"); }
  fs::path state_path() const { return work_ / ("replica_" + std::to_string(index_) + ".json"); }
  fs::path blob_path(std::uint64_t gen) const {
    return work_ / ("replica_" + std::to_string(index_) + "." + std::to_string(gen) + ".ckpt");
  }

  bool load() {
    if (!fs::exists(state_path())) return false;
    const json st = json::parse(read_file(state_path()));
    generation_ = st.at("generation").get<std::uint64_t>();
    samples_done_ = st.at("samples_done").get<std::size_t>();
    blocks_done_ = st.at("blocks_done").get<std::size_t>();
    const auto part_bytes = st.at("part_bytes").get<std::uintmax_t>();
    std::vector<StructureFunctionAccumulator::Batch> batches;
    for (const auto& b : st.at("structure")) {
      batches.push_back({b.at("sums").get<std::vector<double>>(),
                         b.at("counts").get<std::vector<std::uint64_t>>()});
    }
    if (config_.struct_blocks > 0) {
      structure_ = StructureFunctionAccumulator::from_batches(config_.max_lag(), std::move(batches));
    }
    const std::string blob = read_file(blob_path(generation_));
    const std::vector<std::uint8_t> bytes(blob.begin(), blob.end());
    engine_.emplace(ToomEngine::resume(bytes, ModelParams(config_.lambda), config_.mode));
    // Rows written after the checkpoint are replayed, so drop them.
    if (!fs::exists(part_path()) || fs::file_size(part_path()) < part_bytes) {
      throw FormatError("replica " + std::to_string(index_) + ": samples part is shorter than its checkpoint");
    }
    fs::resize_file(part_path(), part_bytes);
    return true;
  }

  void start() {
    engine_.emplace(ToomEngine::half_line(config_.n, ModelParams(config_.lambda), config_.seed,
                                          config_.init_density, index_, config_.mode));
    std::ofstream(part_path(), std::ios::binary | std::ios::trunc);
  }

  /// Runs until done or `halt_after` units; returns true when complete.
  bool run(std::optional<std::size_t> halt_after) {
    std::ofstream part(part_path(), std::ios::binary | std::ios::app);
    if (!part) throw IoError("cannot open " + part_path().string());
    auto last = Clock::now();
    auto maybe_checkpoint = [&] {
      const double elapsed = std::chrono::duration<double>(Clock::now() - last).count();
      if (config_.checkpoint_interval > 0 && elapsed >= config_.checkpoint_interval) {
        save(part);
        last = Clock::now();
      }
    };
    auto halted = [&] { return halt_after && samples_done_ + blocks_done_ >= *halt_after; };

    const double warmup = config_.warmup();
    const double chunk = static_cast<double>(config_.n);
    while (engine_->clock() < warmup) {
      engine_->advance_until(std::min(warmup, engine_->clock() + chunk));
      maybe_checkpoint();
    }

    const auto base = static_cast<std::uint64_t>(index_) * kLanes;
    while (samples_done_ < config_.num_samples) {
      if (halted()) {
        save(part);
        return false;
      }
      const double t = sample_time(samples_done_);
      engine_->advance_until(t);
      const std::string ts = format_number(t);
      std::string rows;
      const LaneValues& m = engine_->magnetizations();
      for (int k = 0; k < kLanes; ++k) {
        rows += ts + ',' + format_number(base + k) + ',' + format_number(m[k]) + '\n';
      }
      part << rows;
      ++samples_done_;
      maybe_checkpoint();
    }

    const std::size_t lag = config_.struct_blocks > 0 ? config_.max_lag() : 0;
    std::vector<std::vector<double>> series(kLanes, std::vector<double>(lag + 1));
    while (blocks_done_ < config_.struct_blocks) {
      if (halted()) {
        save(part);
        return false;
      }
      const double t0 = block_start(blocks_done_);
      for (std::size_t i = 0; i <= lag; ++i) {
        engine_->advance_until(t0 + static_cast<double>(i));
        const LaneValues& m = engine_->magnetizations();
        for (int k = 0; k < kLanes; ++k) series[k][i] = static_cast<double>(m[k]);
      }
      for (const auto& s : series) structure_.push_series_block(s);
      structure_.end_batch();
      ++blocks_done_;
      maybe_checkpoint();
    }
    save(part);
    return true;
  }

  const StructureFunctionAccumulator& structure() const { return structure_; }
  std::size_t index() const { return index_; }

 private:
  double sample_time(std::size_t k) const {
    return config_.warmup() + static_cast<double>(k) * config_.period();
  }
  double block_start(std::size_t b) const {
    // Blocks follow the last sample after one period and are separated by one period.
    const double stride = static_cast<double>(config_.max_lag()) + config_.period();
    return config_.warmup() + static_cast<double>(config_.num_samples) * config_.period() +
           static_cast<double>(b) * stride;
  }

  void save(std::ofstream& part) {
    part.flush();
    if (!part) throw IoError("write failed: " + part_path().string());
    const auto blob = engine_->checkpoint();
    const std::uint64_t gen = generation_ + 1;
    write_file_atomic(blob_path(gen), std::string(blob.begin(), blob.end()));
    json st;
    st["generation"] = gen;
    st["samples_done"] = samples_done_;
    st["blocks_done"] = blocks_done_;
    st["part_bytes"] = fs::file_size(part_path());
    st["structure"] = json::array();
    if (config_.struct_blocks > 0) {
      for (const auto& b : structure_.closed_batches()) {
        st["structure"].push_back({{"sums", b.sums}, {"counts", b.counts}});
      }
    }
    write_file_atomic(state_path(), st.dump());
    std::error_code ec;
    fs::remove(blob_path(generation_), ec);
    generation_ = gen;
  }

  const RunConfig& config_;
  std::size_t index_;
  fs::path work_;
  std::optional<ToomEngine> engine_;
  std::size_t samples_done_ = 0;
  std::size_t blocks_done_ = 0;
  std::uint64_t generation_ = 0;
  StructureFunctionAccumulator structure_;
};

void assemble_outputs(const RunConfig& config, std::vector<Replica>& replicas,
                      SimulationResult& result) {
  const fs::path dir = config.output_dir;
  if (config.num_samples > 0) {
    const fs::path out_path = dir / "samples.csv";
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + out_path.string());
    out << "time,lane,M\n";
    for (auto& r : replicas) {
      std::ifstream in(r.part_path(), std::ios::binary);
      if (!in) throw IoError("cannot read " + r.part_path().string());
      out << in.rdbuf();
    }
    out.flush();
    if (!out) throw IoError("write failed: " + out_path.string());
    result.samples = config.num_samples * config.replicas * kLanes;
  }
  if (config.struct_blocks > 0) {
    StructureFunctionAccumulator merged(config.max_lag());
    for (auto& r : replicas) merged.merge(r.structure());
    write_structure(merged, dir / "structure.csv");
    result.blocks = merged.blocks();
  }
}

}  // namespace

SimulationResult run_simulation(const RunConfig& config, const SimulateOptions& options) {
  config.validate();
  const auto wall_start = Clock::now();
  const std::string started = utc_now();
  const fs::path dir = config.output_dir;
  const fs::path work = dir / "work";
  std::error_code ec;
  fs::create_directories(work, ec);
  if (ec) throw IoError("cannot create " + work.string() + ": " + ec.message());
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  if (options.resume) {
    const fs::path saved = dir / "config.json";
    if (!fs::exists(saved)) throw ConfigError("nothing to resume in " + dir.string());
    RunConfig a = load_run_config(saved), b = config;
    a.threads = b.threads = 0;
    a.checkpoint_interval = b.checkpoint_interval = 0;
    if (to_json(a) != to_json(b)) throw ConfigError("resume with a different configuration");
  } else {
    for (const auto& entry : fs::directory_iterator(work)) fs::remove_all(entry.path());
    fs::remove(dir / "samples.csv", ec);
    fs::remove(dir / "structure.csv", ec);
  }
  save_run_config(config, dir / "config.json");

  std::vector<Replica> replicas;
  replicas.reserve(config.replicas);
  for (std::size_t r = 0; r < config.replicas; ++r) replicas.emplace_back(config, r, work);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> all_complete{true};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::mutex log_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= replicas.size()) return;
      try {
        Replica& rep = replicas[r];
        const bool resumed = options.resume && rep.load();
        if (!resumed) rep.start();
        const bool done = rep.run(options.halt_after);
        if (!done) all_complete = false;
        std::lock_guard lock(log_mutex);
        log("replica " + std::to_string(r) + (done ? " complete" : " halted"));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::size_t threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::max<std::size_t>(1, std::min(threads, replicas.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  SimulationResult result;
  result.complete = all_complete;
  if (result.complete) {
    assemble_outputs(config, replicas, result);
    fs::remove_all(work, ec);
  }
  json meta;
  meta["started_utc"] = started;
  meta["finished_utc"] = utc_now();
  meta["wall_seconds"] = std::chrono::duration<double>(Clock::now() - wall_start).count();
  meta["complete"] = result.complete;
  meta["resumed"] = options.resume;
  write_file_atomic(dir / "run_meta.json", meta.dump(2) + "\n");
  return result;
}

std::vector<std::int64_t> read_sample_values(const fs::path& path) {
  CsvReader reader(path, kSamplesHeader);
  std::vector<std::int64_t> values;
  std::vector<std::string_view> f;
  while (reader.next(f)) values.push_back(parse_int(f[2]));
  return values;
}

void write_structure(const StructureFunctionAccumulator& acc, const fs::path& path) {
  CsvWriter out(path, kStructureHeader);
  std::size_t b = 0;
  for (const auto& batch : acc.closed_batches()) {
    for (std::size_t j = 0; j < batch.sums.size(); ++j) out.row(b, j, batch.sums[j], batch.counts[j]);
    ++b;
  }
  out.close();
}

StructureFunctionAccumulator read_structure(const fs::path& path) {
  CsvReader reader(path, kStructureHeader);
  std::vector<StructureFunctionAccumulator::Batch> batches;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    const auto b = static_cast<std::size_t>(parse_int(f[0]));
    const auto j = static_cast<std::size_t>(parse_int(f[1]));
    if (b == batches.size()) batches.emplace_back();
    if (b + 1 != batches.size() || j != batches.back().sums.size()) {
      throw FormatError(path.string() + ": rows out of order");
    }
    batches.back().sums.push_back(parse_double(f[2]));
    batches.back().counts.push_back(static_cast<std::uint64_t>(parse_int(f[3])));
  }
  if (batches.empty()) throw InsufficientData(path.string() + ": no structure-function data");
  const std::size_t max_lag = batches.front().sums.size() - 1;
  return StructureFunctionAccumulator::from_batches(max_lag, std::move(batches));
}

}  // namespace toom
