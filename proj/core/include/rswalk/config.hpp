#pragma once

// Run configuration: a model definition plus command parameters, read from
// and written to JSON, and the named presets.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rswalk/envgen.hpp"
#include "rswalk/model.hpp"

namespace rswalk {

struct Tolerances {
  double rank = 1e-9;
  double zero_exact = 1e-6;
  double bracket_gap = 1e-4;
  double gamma_zero = 0.02;
  double hypothesis = 1e-12;
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct RunConfig {
  std::string name;
  RegimeModel model;
  std::uint64_t seed = 12345;
  Window window{-500, 500};
  std::size_t n_steps = 10000;
  std::size_t replicates = 200;
  /// 0-based start regime; written 1-based in JSON.
  std::size_t start_regime = 0;
  long start_site = 0;
  long target = 0;
  Tolerances tolerances;
  std::string output_dir = "out";
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline constexpr int kSchemaVersion = 1;

/// Throws ConfigError on malformed input or a model that fails validation.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& c);
nlohmann::json to_json(const EnvSpec& spec);
EnvSpec env_spec_from_json(const nlohmann::json& j);

const std::vector<std::string>& preset_names();
/// Throws ConfigError for an unknown name.
RunConfig preset(std::string_view name);

}  // namespace rswalk
