#include "toom/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "toom/error.hpp"

namespace toom {
namespace {

using nlohmann::json;

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
  } else {
    out = j.at(key).get<T>();
  }
}

}  // namespace

double RunConfig::warmup() const {
  return warmup_time.value_or(0.5 * static_cast<double>(n) * static_cast<double>(n));
}

double RunConfig::period() const { return sample_period.value_or(static_cast<double>(n)); }

std::size_t RunConfig::max_lag() const {
  if (struct_max_lag) return *struct_max_lag;
  return static_cast<std::size_t>(std::ceil(2.0 * std::pow(static_cast<double>(n), 2.0 / 3.0) - 1e-9));
}

void RunConfig::validate() const {
  ModelParams params(lambda);
  (void)params;
  if (n < 2) throw ConfigError("n must be at least 2");
  if (!(init_density >= 0.0 && init_density <= 1.0)) {
    throw ConfigError("init_density must lie in [0, 1]");
  }
  if (!(warmup() >= 0.0) || !std::isfinite(warmup())) throw ConfigError("warmup must be >= 0");
  if (!(period() > 0.0) || !std::isfinite(period())) throw ConfigError("sample period must be > 0");
  if (replicas == 0) throw ConfigError("replicas must be positive");
  if (num_samples == 0 && struct_blocks == 0) throw ConfigError("nothing to sample");
  if (struct_blocks > 0) {
    const double need = 2.0 * std::pow(static_cast<double>(n), 2.0 / 3.0);
    if (static_cast<double>(max_lag()) + 1e-9 < need) {
      throw ConfigError("structure-function lag T must be at least 2 n^(2/3)");
    }
  }
  if (!(checkpoint_interval >= 0.0)) throw ConfigError("checkpoint interval must be >= 0");
  if (output_dir.empty()) throw ConfigError("output directory is empty");
}

const char* to_string(TimeMode mode) { return mode == TimeMode::Exact ? "exact" : "fast"; }

TimeMode parse_time_mode(const std::string& text) {
  if (text == "exact") return TimeMode::Exact;
  if (text == "fast") return TimeMode::Fast;
  throw ConfigError("mode must be 'exact' or 'fast', got '" + text + "'");
}

std::string to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["lambda"] = c.lambda;
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["init_density"] = c.init_density;
  j["warmup_time"] = c.warmup_time ? json(*c.warmup_time) : json(nullptr);
  j["sample_period"] = c.sample_period ? json(*c.sample_period) : json(nullptr);
  j["num_samples"] = c.num_samples;
  j["struct_blocks"] = c.struct_blocks;
  j["struct_max_lag"] = c.struct_max_lag ? json(*c.struct_max_lag) : json(nullptr);
  j["replicas"] = c.replicas;
  j["mode"] = to_string(c.mode);
  j["output_dir"] = c.output_dir.string();
  j["checkpoint_interval"] = c.checkpoint_interval;
  j["threads"] = c.threads;
  return j.dump(2) + "\n";
}

RunConfig merge_json(RunConfig c, const std::string& text) {
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != kConfigSchemaVersion) {
      throw ConfigError("unsupported config schema_version");
    }
    static const char* const kKnown[] = {
        "schema_version", "lambda",       "n",        "seed", "init_density",
        "warmup_time",    "sample_period", "num_samples", "struct_blocks", "struct_max_lag",
        "replicas",       "mode",         "output_dir", "checkpoint_interval", "threads"};
    for (const auto& item : j.items()) {
      bool known = false;
      for (const char* k : kKnown) known = known || item.key() == k;
      if (!known) throw ConfigError("unknown config key '" + item.key() + "'");
    }
    read_key(j, "lambda", c.lambda);
    read_key(j, "n", c.n);
    read_key(j, "seed", c.seed);
    read_key(j, "init_density", c.init_density);
    read_optional(j, "warmup_time", c.warmup_time);
    read_optional(j, "sample_period", c.sample_period);
    read_key(j, "num_samples", c.num_samples);
    read_key(j, "struct_blocks", c.struct_blocks);
    read_optional(j, "struct_max_lag", c.struct_max_lag);
    read_key(j, "replicas", c.replicas);
    if (j.contains("mode")) c.mode = parse_time_mode(j.at("mode").get<std::string>());
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    read_key(j, "checkpoint_interval", c.checkpoint_interval);
    read_key(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig run_config_from_json(const std::string& text) {
  const RunConfig c = merge_json(RunConfig{}, text);
  if (nlohmann::json::parse(text).value("schema_version", 0) != kConfigSchemaVersion) {
    throw ConfigError("config lacks schema_version");
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

void save_run_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << to_json(config);
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace toom
