#include "textswarm/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "textswarm/errors.hpp"
#include "textswarm/perception.hpp"
#include "textswarm/providers.hpp"

namespace textswarm {

namespace {

nlohmann::json uid_json(const ClusterUid& uid) { return nlohmann::json::array({uid.origin, uid.counter}); }

std::shared_ptr<ProviderClient> client_for(const std::string& endpoint) {
  if (endpoint.empty()) return nullptr;
  return std::make_shared<ProviderClient>(open_channel(endpoint));
}

std::shared_ptr<const LanguageBackend> make_language(const SimConfig& c) {
  const auto dim = static_cast<std::size_t>(c.embedding_dim);
  if (c.providers.embedder.empty() && c.providers.summarizer.empty()) return reference_language(dim);
  return std::make_shared<RemoteLanguage>(client_for(c.providers.embedder),
                                          client_for(c.providers.summarizer), dim);
}

Describer make_describer(const SimConfig& c) {
  if (c.providers.describer.empty()) return reference_describer();
  return remote_describer(client_for(c.providers.describer));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot read artifact file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string db_file_name(int robot_id) { return "db_robot_" + std::to_string(robot_id) + ".json"; }

}  // namespace

Arena make_arena(const SimConfig& config) {
  Arena arena;
  arena.width = config.arena.width;
  arena.height = config.arena.height;
  if (config.arena.layout == "venue") arena.obstacles = venue_obstacles(arena.width, arena.height);
  arena.obstacles.insert(arena.obstacles.end(), config.arena.obstacles.begin(),
                         config.arena.obstacles.end());
  arena.validate();
  return arena;
}

World initial_world(const SimConfig& config) {
  config.validate();
  const std::uint64_t seed = config.seed;
  World world;
  world.arena = make_arena(config);

  const auto n_people = static_cast<std::size_t>(config.people.count);
  std::vector<PersonAttributes> outfits;
  if (config.people.distinct_outfits) {
    Rng rng = make_stream(seed, "people.outfits", 0);
    outfits = sample_distinct_outfits(n_people, config.people.distinct_max_similarity, rng,
                                      config.people.accessory_rate);
  } else {
    for (std::size_t i = 0; i < n_people; ++i) {
      Rng rng = make_stream(seed, "person.attributes", i);
      outfits.push_back(sample_attributes(rng, config.people.accessory_rate));
    }
  }

  for (std::size_t i = 0; i < n_people; ++i) {
    Rng spawn = make_stream(seed, "person.spawn", i);
    PersonState p;
    p.person_id = static_cast<int>(i);
    p.pose.position = sample_free_point(world.arena, spawn);
    p.pose.heading = spawn.uniform(0.0, kTwoPi);
    p.motion = {config.people.speed, config.people.turn_rate};
    p.attributes = std::move(outfits[i]);
    world.people.push_back(std::move(p));
    world.person_motion.push_back(make_stream(seed, "person.motion", i));
  }

  for (int i = 0; i < config.robots.count; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    Rng spawn = make_stream(seed, "robot.spawn", index);
    RobotState r;
    r.robot_id = i;
    r.pose.position = sample_free_point(world.arena, spawn);
    r.pose.heading = spawn.uniform(0.0, kTwoPi);
    r.motion = {config.robots.speed, config.robots.turn_rate};
    r.fov_half_angle = config.robots.fov_half_angle;
    r.sensing_range = config.robots.sensing_range;
    r.comm_range = config.robots.comm_range;
    world.robots.push_back(r);
    world.robot_motion.push_back(make_stream(seed, "robot.motion", index));
  }
  return world;
}

RunArtifact run_experiment(const SimConfig& config) {
  config.validate();
  RunArtifact out;
  out.config = config;
  out.config_fingerprint = config.fingerprint();

  World world = initial_world(config);
  for (const auto& p : world.people) out.people.emplace(p.person_id, p.attributes);

  const auto language = make_language(config);
  const Describer describer = make_describer(config);
  const MatchMode mode = parse_match_mode(config.mode);
  const TrackParams track_params{config.perception.max_gap_ticks, config.perception.p_track_break};

  const auto n_robots = world.robots.size();
  std::vector<TrackTable> tracks(n_robots);
  std::vector<Rng> perception_rng;
  for (std::size_t r = 0; r < n_robots; ++r) {
    perception_rng.push_back(make_stream(config.seed, "robot.perception", r));
    out.databases.emplace_back(static_cast<int>(r), mode, language,
                               static_cast<std::size_t>(config.exchange.tombstone_cap));
  }
  std::map<std::pair<int, int>, int> last_exchange;

  for (int tick = 0; tick < config.duration_ticks; ++tick) {
    world.advance(config.dt);

    for (std::size_t r = 0; r < n_robots; ++r) {
      const auto visible = visible_people(world.robots[r], world.people, world.arena);
      for (const auto& a : tracks[r].update(visible, tick, track_params, perception_rng[r])) {
        const Track& track = tracks[r].track(a.track_id);
        if (!a.fresh && tick - track.last_described_tick < config.perception.description_period) continue;
        const auto& person = world.people[static_cast<std::size_t>(a.person_id)];
        std::string text = describer(person.attributes, config.noise, perception_rng[r]);
        auto record = make_record(std::move(text), static_cast<int>(r), tick, a.track_id,
                                  SealedPersonId(a.person_id));
        const auto result = out.databases[r].assign(std::move(record), config.thresholds.local);
        tracks[r].mark_described(a.track_id, tick);
        if (result.route == AssignResult::Route::kCreated) {
          out.events.push_back({{"tick", tick},
                                {"type", "cluster_created"},
                                {"robot", static_cast<int>(r)},
                                {"uid", uid_json(result.uid)},
                                {"track", a.track_id}});
        }
      }
    }

    if (!config.communication_enabled) continue;
    for (const auto& pair : comm_pairs(world.robots)) {
      const auto it = last_exchange.find(pair);
      if (it != last_exchange.end() && tick - it->second < config.exchange.cooldown_ticks) continue;
      last_exchange[pair] = tick;
      auto& a = out.databases[static_cast<std::size_t>(pair.first)];
      auto& b = out.databases[static_cast<std::size_t>(pair.second)];
      const auto result = exchange(a, b, config.thresholds.merge);
      out.events.push_back({{"tick", tick},
                            {"type", "exchange"},
                            {"robots", {pair.first, pair.second}},
                            {"records", {result.into_a.records_added, result.into_b.records_added}},
                            {"merged", {result.into_a.merged.size(), result.into_b.merged.size()}},
                            {"copied", {result.into_a.copied.size(), result.into_b.copied.size()}}});
      auto log_merges = [&](int robot, const AbsorbResult& absorbed) {
        for (const auto& m : absorbed.merged) {
          out.events.push_back({{"tick", tick},
                                {"type", "cluster_merged"},
                                {"robot", robot},
                                {"received", uid_json(m.received)},
                                {"into", uid_json(m.into)},
                                {"records", m.records_added}});
        }
      };
      log_merges(pair.first, result.into_a);
      log_merges(pair.second, result.into_b);
    }
  }

  out.metrics = evaluate(out.databases, out.people, static_cast<std::size_t>(config.k_max), *language,
                         out.config_fingerprint);
  return out;
}

std::map<std::string, std::string> render_artifact(const RunArtifact& artifact) {
  std::map<std::string, std::string> files;
  files["config.json"] = artifact.config.to_flat_json().dump(2) + "\n";

  nlohmann::json people = nlohmann::json::array();
  for (const auto& [id, attrs] : artifact.people)
    people.push_back({{"id", id}, {"attributes", attrs}, {"canonical", canonical_description(attrs)}});
  files["people.json"] = nlohmann::json{{"people", people}}.dump(2) + "\n";

  for (const auto& db : artifact.databases) files[db_file_name(db.owner())] = db.to_json().dump(1) + "\n";

  std::string events;
  for (const auto& e : artifact.events) events += e.dump() + "\n";
  files["events.ndjson"] = std::move(events);

  const SimConfig& c = artifact.config;
  const nlohmann::json protocol = {
      {"probes", "noise-free canonical description of each detected ground-truth person"},
      {"gallery", "every cluster of every robot, pooled; label = majority ground-truth id"},
      {"scoring", c.mode == "vector" ? "cosine(probe embedding, member-embedding centroid)"
                                     : "cosine(probe embedding, summary embedding)"},
      {"embedder", c.providers.embedder.empty() ? "reference hashed unigram+bigram" : c.providers.embedder},
      {"summarizer", c.providers.summarizer.empty() ? "reference slot consensus" : c.providers.summarizer},
      {"describer", c.providers.describer.empty() ? "reference template" : c.providers.describer}};
  files["metrics.json"] =
      nlohmann::json{{"report", artifact.metrics}, {"protocol", protocol}, {"config", c.to_flat_json()}}
          .dump(2) +
      "\n";
  files["cmc.csv"] = cmc_csv(artifact.metrics);
  return files;
}

void write_artifact(const RunArtifact& artifact, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : render_artifact(artifact)) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw ContractError("cannot write artifact file " + (dir / name).string());
    out << content;
  }
}

RunArtifact read_artifact(const std::filesystem::path& dir) {
  RunArtifact a;
  a.config = SimConfig::from_json(nlohmann::json::parse(read_file(dir / "config.json")));
  a.config_fingerprint = a.config.fingerprint();

  const auto people = nlohmann::json::parse(read_file(dir / "people.json"));
  for (const auto& p : people.at("people"))
    a.people.emplace(p.at("id").get<int>(), p.at("attributes").get<PersonAttributes>());

  // Stored snapshots are re-evaluated with the reference language at the recorded dimension.
  const auto language = reference_language(static_cast<std::size_t>(a.config.embedding_dim));
  for (int r = 0; r < a.config.robots.count; ++r)
    a.databases.push_back(
        ClusterDatabase::from_json(nlohmann::json::parse(read_file(dir / db_file_name(r))), language));

  std::istringstream events(read_file(dir / "events.ndjson"));
  for (std::string line; std::getline(events, line);)
    if (!line.empty()) a.events.push_back(nlohmann::json::parse(line));

  a.metrics = nlohmann::json::parse(read_file(dir / "metrics.json")).at("report").get<MetricsReport>();
  return a;
}

MetricsReport recompute_metrics(const RunArtifact& artifact) {
  const auto language = artifact.databases.empty()
                            ? reference_language(static_cast<std::size_t>(artifact.config.embedding_dim))
                            : artifact.databases.front().language_ptr();
  return evaluate(artifact.databases, artifact.people, static_cast<std::size_t>(artifact.config.k_max),
                  *language, artifact.config_fingerprint);
}

namespace {

double metric_value(const MetricsReport& r, std::string_view name) {
  if (name == "cmc1") return r.cmc_at(1);
  if (name == "cmc5") return r.cmc_at(5);
  if (name == "map") return r.map_score;
  if (name == "avg_purity") return r.avg_purity;
  if (name == "normalized_purity") return r.normalized_purity;
  if (name == "total_clusters") return r.total_clusters();
  if (name == "detected") return r.detected_identity_count;
  throw ContractError("unknown sweep metric " + std::string(name));
}

MetricSummary summarize_values(const std::vector<double>& v) {
  MetricSummary s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

std::string csv_value(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

SweepTable sweep(const SimConfig& base, const std::string& axis, const std::vector<nlohmann::json>& values,
                 const std::vector<std::uint64_t>& seeds, int jobs) {
  if (values.empty() || seeds.empty()) throw ContractError("sweep needs at least one value and one seed");
  (void)base.get(axis);  // unknown axis -> ConfigError

  std::vector<SimConfig> cells;
  for (const auto& value : values) {
    for (auto seed : seeds) {
      SimConfig c = base;
      c.set(axis, value);
      c.seed = seed;
      c.validate();
      cells.push_back(std::move(c));
    }
  }

  std::vector<MetricsReport> results(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        results[i] = run_experiment(cells[i]).metrics;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n_threads = jobs > 0 ? static_cast<unsigned>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepTable table{axis, seeds, {}};
  for (std::size_t v = 0; v < values.size(); ++v) {
    SweepRow row;
    row.value = values[v];
    for (std::size_t s = 0; s < seeds.size(); ++s) row.runs.push_back(results[v * seeds.size() + s]);
    for (const char* name : kSweepMetrics) {
      std::vector<double> xs;
      for (const auto& r : row.runs) xs.push_back(metric_value(r, name));
      row.summary[name] = summarize_values(xs);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string sweep_csv(const SweepTable& table) {
  std::string out = table.axis + ",runs";
  for (const char* name : kSweepMetrics) out += std::string(",") + name + "_mean," + name + "_std";
  out += "\n";
  for (const auto& row : table.rows) {
    out += csv_value(row.value) + "," + std::to_string(row.runs.size());
    for (const char* name : kSweepMetrics) {
      const auto& s = row.summary.at(name);
      out += "," + format_double(s.mean) + "," + format_double(s.stddev);
    }
    out += "\n";
  }
  return out;
}

std::vector<RobotQueryResult> query_databases(const std::vector<ClusterDatabase>& dbs, int robot_id,
                                              const std::string& text, std::size_t k) {
  std::vector<RobotQueryResult> out;
  if (robot_id < 0) {
    for (const auto& db : dbs) out.push_back({db.owner(), db.query(text, k)});
    return out;
  }
  for (const auto& db : dbs)
    if (db.owner() == robot_id) return {{robot_id, db.query(text, k)}};
  std::string valid;
  for (const auto& db : dbs) valid += (valid.empty() ? "" : ", ") + std::to_string(db.owner());
  throw ContractError("unknown robot id " + std::to_string(robot_id) + "; valid ids: " + valid);
}

std::string render_query_table(const std::vector<RobotQueryResult>& results) {
  std::ostringstream out;
  for (const auto& r : results) {
    out << "robot " << r.robot_id << "\n";
    if (r.hits.empty()) out << "  (no clusters)\n";
    for (std::size_t i = 0; i < r.hits.size(); ++i) {
      const auto& h = r.hits[i];
      char score[32];
      std::snprintf(score, sizeof score, "%.4f", h.score);
      out << "  " << i + 1 << ". " << score << "  " << to_string(h.uid) << "  " << h.summary << "\n";
      for (const auto& s : h.samples)
        out << "       robot " << s.robot_id << " tick " << s.tick << ": " << s.text << "\n";
    }
  }
  return out.str();
}

}  // namespace textswarm
