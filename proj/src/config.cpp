#include "textswarm/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "textswarm/errors.hpp"
#include "textswarm/hashing.hpp"

namespace textswarm {

void to_json(nlohmann::json& j, const Rect& r) { j = nlohmann::json::array({r.min_x, r.min_y, r.max_x, r.max_y}); }

void from_json(const nlohmann::json& j, Rect& r) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("obstacle must be [min_x, min_y, max_x, max_y]");
  for (const auto& v : j)
    if (!v.is_number()) throw std::invalid_argument("obstacle coordinates must be numbers");
  r = Rect{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

namespace {

struct TypeMismatch {
  std::string expected;
};

template <class T>
T strict_get(const nlohmann::json& v) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw TypeMismatch{"boolean"};
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      throw TypeMismatch{"non-negative integer"};
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw TypeMismatch{"integer"};
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw TypeMismatch{"number"};
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw TypeMismatch{"string"};
  } else {
    if (!v.is_array()) throw TypeMismatch{"array of [min_x, min_y, max_x, max_y]"};
    try {
      return v.get<T>();
    } catch (const std::exception&) {
      throw TypeMismatch{"array of [min_x, min_y, max_x, max_y]"};
    }
  }
  return v.get<T>();
}

struct Field {
  std::string key;
  std::function<nlohmann::json(const SimConfig&)> get;
  std::function<void(SimConfig&, const nlohmann::json&)> set;
};

template <class Ref>
Field field(std::string key, Ref ref) {
  using T = std::remove_cvref_t<decltype(ref(std::declval<SimConfig&>()))>;
  return {std::move(key), [ref](const SimConfig& c) { return nlohmann::json(ref(c)); },
          [ref](SimConfig& c, const nlohmann::json& v) { ref(c) = strict_get<T>(v); }};
}

#define TEXTSWARM_FIELD(key, member) field(key, [](auto& c) -> auto& { return c.member; })

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      TEXTSWARM_FIELD("seed", seed),
      TEXTSWARM_FIELD("duration_ticks", duration_ticks),
      TEXTSWARM_FIELD("dt", dt),
      TEXTSWARM_FIELD("arena.width", arena.width),
      TEXTSWARM_FIELD("arena.height", arena.height),
      TEXTSWARM_FIELD("arena.layout", arena.layout),
      TEXTSWARM_FIELD("arena.obstacles", arena.obstacles),
      TEXTSWARM_FIELD("robots.count", robots.count),
      TEXTSWARM_FIELD("robots.speed", robots.speed),
      TEXTSWARM_FIELD("robots.fov_half_angle", robots.fov_half_angle),
      TEXTSWARM_FIELD("robots.sensing_range", robots.sensing_range),
      TEXTSWARM_FIELD("robots.comm_range", robots.comm_range),
      TEXTSWARM_FIELD("robots.turn_rate", robots.turn_rate),
      TEXTSWARM_FIELD("people.count", people.count),
      TEXTSWARM_FIELD("people.speed", people.speed),
      TEXTSWARM_FIELD("people.turn_rate", people.turn_rate),
      TEXTSWARM_FIELD("people.distinct_outfits", people.distinct_outfits),
      TEXTSWARM_FIELD("people.distinct_max_similarity", people.distinct_max_similarity),
      TEXTSWARM_FIELD("people.accessory_rate", people.accessory_rate),
      TEXTSWARM_FIELD("perception.description_period", perception.description_period),
      TEXTSWARM_FIELD("perception.max_gap_ticks", perception.max_gap_ticks),
      TEXTSWARM_FIELD("perception.p_track_break", perception.p_track_break),
      TEXTSWARM_FIELD("noise.p_drop", noise.p_drop),
      TEXTSWARM_FIELD("noise.p_synonym", noise.p_synonym),
      TEXTSWARM_FIELD("noise.p_color_confusion", noise.p_color_confusion),
      TEXTSWARM_FIELD("thresholds.local", thresholds.local),
      TEXTSWARM_FIELD("thresholds.merge", thresholds.merge),
      TEXTSWARM_FIELD("exchange.cooldown_ticks", exchange.cooldown_ticks),
      TEXTSWARM_FIELD("exchange.tombstone_cap", exchange.tombstone_cap),
      TEXTSWARM_FIELD("communication_enabled", communication_enabled),
      TEXTSWARM_FIELD("mode", mode),
      TEXTSWARM_FIELD("language.embedding_dim", embedding_dim),
      TEXTSWARM_FIELD("metrics.k_max", k_max),
      TEXTSWARM_FIELD("providers.describer", providers.describer),
      TEXTSWARM_FIELD("providers.summarizer", providers.summarizer),
      TEXTSWARM_FIELD("providers.embedder", providers.embedder),
  };
  return table;
}

#undef TEXTSWARM_FIELD

const Field* find_field(std::string_view key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

void flatten(const nlohmann::json& node, const std::string& prefix,
             std::vector<std::pair<std::string, nlohmann::json>>& out) {
  for (const auto& [name, value] : node.items()) {
    const std::string key = prefix.empty() ? name : prefix + "." + name;
    if (value.is_object())
      flatten(value, key, out);
    else
      out.emplace_back(key, value);
  }
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

nlohmann::json SimConfig::to_flat_json() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& f : fields()) doc[f.key] = f.get(*this);
  return doc;
}

nlohmann::json SimConfig::get(std::string_view key) const {
  const Field* f = find_field(key);
  if (f == nullptr) throw ConfigError({std::string(key)}, "unknown key");
  return f->get(*this);
}

void SimConfig::set(std::string_view key, const nlohmann::json& value) {
  const Field* f = find_field(key);
  if (f == nullptr) throw ConfigError({std::string(key)}, "unknown key");
  try {
    f->set(*this, value);
  } catch (const TypeMismatch& e) {
    throw ConfigError({std::string(key)}, "expected " + e.expected + ", got " + value.dump());
  }
}

SimConfig SimConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError({"<root>"}, "configuration must be a JSON object");
  std::vector<std::pair<std::string, nlohmann::json>> entries;
  flatten(doc, "", entries);
  SimConfig c;
  std::vector<std::string> bad;
  std::string detail;
  for (const auto& [key, value] : entries) {
    try {
      c.set(key, value);
    } catch (const ConfigError& e) {
      bad.push_back(key);
      detail += (detail.empty() ? "" : "; ") + std::string(e.what());
    }
  }
  if (!bad.empty()) throw ConfigError(bad, detail);
  c.validate();
  return c;
}

void SimConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError({std::string(assignment)}, "override must look like key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  set(key, value);
}

void SimConfig::validate() const {
  std::vector<std::string> bad;
  auto require = [&](bool ok, const char* key) {
    if (!ok) bad.emplace_back(key);
  };
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  require(duration_ticks >= 0, "duration_ticks");
  require(dt > 0.0 && std::isfinite(dt), "dt");
  require(arena.width > 0.0, "arena.width");
  require(arena.height > 0.0, "arena.height");
  require(arena.layout == "open" || arena.layout == "venue", "arena.layout");
  const Rect bounds{-arena.width / 2, -arena.height / 2, arena.width / 2, arena.height / 2};
  bool obstacles_ok = true;
  for (const Rect& r : arena.obstacles) obstacles_ok = obstacles_ok && r.valid() && r.inside(bounds);
  require(obstacles_ok, "arena.obstacles");
  require(robots.count >= 1, "robots.count");
  require(robots.speed >= 0.0, "robots.speed");
  require(robots.fov_half_angle > 0.0 && robots.fov_half_angle <= std::numbers::pi, "robots.fov_half_angle");
  require(robots.sensing_range > 0.0, "robots.sensing_range");
  require(robots.comm_range > 0.0, "robots.comm_range");
  require(robots.turn_rate >= 0.0, "robots.turn_rate");
  require(people.count >= 1, "people.count");
  require(people.speed >= 0.0, "people.speed");
  require(people.turn_rate >= 0.0, "people.turn_rate");
  require(prob(people.distinct_max_similarity), "people.distinct_max_similarity");
  require(prob(people.accessory_rate), "people.accessory_rate");
  require(perception.description_period >= 1, "perception.description_period");
  require(perception.max_gap_ticks >= 1, "perception.max_gap_ticks");
  require(prob(perception.p_track_break), "perception.p_track_break");
  require(prob(noise.p_drop), "noise.p_drop");
  require(prob(noise.p_synonym), "noise.p_synonym");
  require(prob(noise.p_color_confusion), "noise.p_color_confusion");
  require(prob(thresholds.local), "thresholds.local");
  require(prob(thresholds.merge), "thresholds.merge");
  require(exchange.cooldown_ticks >= 1, "exchange.cooldown_ticks");
  require(exchange.tombstone_cap >= 0, "exchange.tombstone_cap");
  require(mode == "text" || mode == "vector", "mode");
  require(embedding_dim >= 1, "language.embedding_dim");
  require(k_max >= 1, "metrics.k_max");
  auto endpoint_ok = [](const std::string& e) {
    return e.empty() || e.rfind("exec:", 0) == 0 || e.rfind("http://", 0) == 0;
  };
  require(endpoint_ok(providers.describer), "providers.describer");
  require(endpoint_ok(providers.summarizer), "providers.summarizer");
  require(endpoint_ok(providers.embedder), "providers.embedder");
  if (!bad.empty()) throw ConfigError(bad, "value out of range");
}

std::string SimConfig::fingerprint() const { return hex64(fnv1a64(to_flat_json().dump())); }

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path}, "cannot open configuration file");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto doc = nlohmann::json::parse(buf.str(), nullptr, false, /*ignore_comments=*/true);
  if (doc.is_discarded()) throw ConfigError({path}, "configuration file is not valid JSON");
  return SimConfig::from_json(doc);
}

}  // namespace textswarm
