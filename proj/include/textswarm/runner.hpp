#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "textswarm/config.hpp"
#include "textswarm/metrics.hpp"
#include "textswarm/reid.hpp"
#include "textswarm/world.hpp"

namespace textswarm {

struct RunArtifact {
  SimConfig config;
  std::string config_fingerprint;
  std::map<int, PersonAttributes> people;
  std::vector<ClusterDatabase> databases;
  std::vector<nlohmann::json> events;
  MetricsReport metrics;
};

// Arena (layout plus extra obstacles) described by a config.
Arena make_arena(const SimConfig& config);

// Agents at tick 0, before any motion.
World initial_world(const SimConfig& config);

RunArtifact run_experiment(const SimConfig& config);

// File name -> exact file content of the artifact directory.
std::map<std::string, std::string> render_artifact(const RunArtifact& artifact);
void write_artifact(const RunArtifact& artifact, const std::filesystem::path& dir);
RunArtifact read_artifact(const std::filesystem::path& dir);

// Recomputes the metrics of a stored artifact from its snapshots.
MetricsReport recompute_metrics(const RunArtifact& artifact);

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
};

struct SweepRow {
  nlohmann::json value;
  std::vector<MetricsReport> runs;  // one per seed, in seed order
  std::map<std::string, MetricSummary> summary;
};

struct SweepTable {
  std::string axis;
  std::vector<std::uint64_t> seeds;
  std::vector<SweepRow> rows;
};

inline constexpr const char* kSweepMetrics[] = {
    "cmc1", "cmc5", "map", "avg_purity", "normalized_purity", "total_clusters", "detected"};

// Cross product of axis values and seeds, jobs <= 0 uses all hardware threads.
SweepTable sweep(const SimConfig& base, const std::string& axis,
                 const std::vector<nlohmann::json>& values, const std::vector<std::uint64_t>& seeds,
                 int jobs = 0);

std::string sweep_csv(const SweepTable& table);

// Query rendering shared by the CLI and the python module.
struct RobotQueryResult {
  int robot_id = 0;
  std::vector<QueryHit> hits;
};

// robot_id < 0 queries every database. Unknown ids raise ContractError listing valid ids.
std::vector<RobotQueryResult> query_databases(const std::vector<ClusterDatabase>& dbs,
                                              int robot_id, const std::string& text,
                                              std::size_t k);
std::string render_query_table(const std::vector<RobotQueryResult>& results);

}  // namespace textswarm
