#pragma once

// Configuration of a half-line interface run, stored as versioned JSON.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "toom/lattice.hpp"

namespace toom {

inline constexpr int kConfigSchemaVersion = 1;

struct RunConfig {
  double lambda = 0.125;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double init_density = 0.5;
  std::optional<double> warmup_time;    ///< default n^2 / 2
  std::optional<double> sample_period;  ///< default n
  /// Sample times per replica; each records all 64 lanes.
  std::size_t num_samples = 0;
  /// Structure-function blocks per replica (0: no structure function).
  std::size_t struct_blocks = 0;
  std::optional<std::size_t> struct_max_lag;  ///< T, default ceil(2 n^(2/3))
  /// Replica words (64 lanes each), each with its own generator stream.
  std::size_t replicas = 1;
  TimeMode mode = TimeMode::Exact;
  std::filesystem::path output_dir = "run";
  /// Wall-clock seconds between checkpoints (0: only at the end of a replica).
  double checkpoint_interval = 600.0;
  std::size_t threads = 0;  ///< 0: hardware concurrency

  double warmup() const;
  double period() const;
  std::size_t max_lag() const;

  /// Throws ConfigError (DomainError for a bad lambda) on violated invariants.
  void validate() const;
};

std::string to_json(const RunConfig& config);
/// Throws ConfigError for a malformed document or an unknown schema version.
RunConfig run_config_from_json(const std::string& text);
/// Applies the keys present in `text` on top of `base`.
RunConfig merge_json(RunConfig base, const std::string& text);

RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

const char* to_string(TimeMode mode);
/// Throws ConfigError for anything but "exact" or "fast".
TimeMode parse_time_mode(const std::string& text);

}  // namespace toom
