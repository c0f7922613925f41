#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "textswarm/geometry.hpp"
#include "textswarm/perception.hpp"

namespace textswarm {

struct ArenaConfig {
  double width = 25.0;
  double height = 25.0;
  std::string layout = "open";  // "open" or "venue"
  std::vector<Rect> obstacles;  // extra obstacles on top of the layout
};

struct RobotGroupConfig {
  int count = 4;
  double speed = 0.5;
  double fov_half_angle = 0.6;
  double sensing_range = 8.0;
  double comm_range = 5.0;
  double turn_rate = 0.1;
};

struct PeopleConfig {
  int count = 6;
  double speed = 0.3;
  double turn_rate = 0.2;
  bool distinct_outfits = true;
  double distinct_max_similarity = 0.6;
  double accessory_rate = 0.3;
};

struct PerceptionConfig {
  int description_period = 10;
  int max_gap_ticks = 20;
  double p_track_break = 0.002;
};

struct ThresholdConfig {
  double local = 0.8;
  double merge = 0.8;
};

struct ExchangeConfig {
  int cooldown_ticks = 50;
  int tombstone_cap = 4096;
};

struct ProviderConfig {
  // Empty selects the reference implementation; otherwise "exec:<command>" or an http:// URL.
  std::string describer;
  std::string summarizer;
  std::string embedder;
};

struct SimConfig {
  std::uint64_t seed = 1;
  int duration_ticks = 6000;
  double dt = 0.1;
  ArenaConfig arena;
  RobotGroupConfig robots;
  PeopleConfig people;
  PerceptionConfig perception;
  NoiseParams noise;
  ThresholdConfig thresholds;
  ExchangeConfig exchange;
  bool communication_enabled = true;
  std::string mode = "text";  // "text" or "vector"
  int embedding_dim = 256;
  int k_max = 20;
  ProviderConfig providers;

  // Flat dotted-key document with every key, sorted.
  nlohmann::json to_flat_json() const;

  // Accepts nested objects or flat dotted keys. Unknown keys and type errors
  // raise ConfigError listing every offending key.
  static SimConfig from_json(const nlohmann::json& doc);

  // "key=value"; the value is parsed as JSON when possible, otherwise taken as a string.
  void apply_override(std::string_view assignment);
  void set(std::string_view key, const nlohmann::json& value);
  nlohmann::json get(std::string_view key) const;

  // Throws ConfigError listing offending keys.
  void validate() const;

  // Hash of the canonical flat document (includes the seed).
  std::string fingerprint() const;
};

std::vector<std::string> config_keys();

SimConfig load_config(const std::string& path);

void to_json(nlohmann::json& j, const Rect& r);
void from_json(const nlohmann::json& j, Rect& r);

}  // namespace textswarm
