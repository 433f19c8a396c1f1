#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbmlab/engine.hpp"
#include "bbmlab/functionals.hpp"

namespace bbmlab {

inline constexpr const char* kConfigFormat = "bbm-lab/config-v1";
inline constexpr const char* kManifestFormat = "bbm-lab/manifest-v1";

struct EngineSettings {
  double dt = 1e-2;
  double horizon = 1.0;
  double start = 0.0;
  std::optional<double> x_max = 40.0;
  std::map<int, double> offspring = {{2, 1.0}};
  double sigma = 1.0;
  double drift = 1.0;
  std::vector<double> snapshot_times;  // empty: the horizon only
  std::optional<BarrierSpec> barrier;
  std::optional<double> floor;
  bool stop_at_floor = false;
  bool continue_killed = false;
  bool record_pruned = false;
  std::uint64_t max_particles = 5'000'000;

  friend bool operator==(const EngineSettings&, const EngineSettings&) = default;
};

/// Everything one command needs. Round-trips through to_json / config_from_json.
struct Config {
  std::string command = "simulate";
  std::uint64_t seed = 20240607;
  std::size_t reps = 0;  // 0: command default
  double t = 0.0;        // 0: command default
  std::string out = "bbm-out";
  unsigned workers = 0;  // 0: BBM_LAB_WORKERS, else 1
  double wall_clock_budget_s = 0.0;
  EngineSettings engine;
  /// A catalog key, or an object {key, pieces, alpha, kappa, bound_constant, flags}.
  nlohmann::json functional = "x";
  std::string mode = "additive-cauchy";
  double proxy_offset = 5.0;
  std::string cf_range = "unit";
  double mu_z = 0.0;
  std::vector<std::string> constants_functionals;
  std::vector<std::string> suites;
  double stopping_x = 1.0;
  double stopping_s = 4.0;

  friend bool operator==(const Config&, const Config&) = default;
};

nlohmann::json to_json(const Config& config);
/// Strict: unknown keys and wrong types raise InvalidArgument naming the key.
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::string& path);
/// Sets one field by dotted path ("engine.dt") from a JSON-encoded value.
void set_config_value(Config& config, const std::string& path, const nlohmann::json& value);
void validate(const Config& config);

EngineConfig engine_config(const EngineSettings& settings, std::uint64_t seed);
FunctionalSpec resolve_functional(const nlohmann::json& descriptor);

struct FieldDoc {
  std::string path;
  std::string default_value;
  std::string symbol;
  std::string meaning;
};
std::vector<FieldDoc> config_field_docs();

/// 64-bit FNV-1a of a byte string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace bbmlab
