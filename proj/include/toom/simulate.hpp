#pragma once

// Half-line interface runs: warmup, scheduled magnetization samples and
// structure-function blocks over a pool of replica engines, with periodic
// checkpoints and bit-exact resume.
//
// Output directory layout:
//   config.json    the run configuration
//   samples.csv    time,lane,M   (lane = 64 * replica + bit)
//   structure.csv  batch,j,sum,count  (written when struct_blocks > 0)
//   run_meta.json  wall-clock timestamps (the only nondeterministic file)
//   work/          per-replica checkpoints while the run is incomplete

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "toom/estimators.hpp"
#include "toom/run_config.hpp"

namespace toom {

inline const std::vector<std::string> kSamplesHeader = {"time", "lane", "M"};
inline const std::vector<std::string> kStructureHeader = {"batch", "j", "sum", "count"};

struct SimulateOptions {
  /// Continue from the checkpoints in output_dir/work.
  bool resume = false;
  /// Stop every replica after this many sample times plus blocks (checkpointing
  /// first); the run is then incomplete and can be resumed.
  std::optional<std::size_t> halt_after;
  std::function<void(const std::string&)> log;
};

struct SimulationResult {
  bool complete = false;
  std::size_t samples = 0;  ///< lane samples written to samples.csv
  std::size_t blocks = 0;   ///< lane blocks in the structure function
};

/// Throws ConfigError, IoError or FormatError (corrupt checkpoints).
SimulationResult run_simulation(const RunConfig& config, const SimulateOptions& options = {});

/// All M values of a samples.csv file, in file order.
std::vector<std::int64_t> read_sample_values(const std::filesystem::path& path);

/// Structure function stored in a structure.csv file.
StructureFunctionAccumulator read_structure(const std::filesystem::path& path);
void write_structure(const StructureFunctionAccumulator& acc, const std::filesystem::path& path);

}  // namespace toom
