#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "textswarm/language.hpp"
#include "textswarm/reid.hpp"
#include "textswarm/vocabulary.hpp"

namespace textswarm {

// Most frequent sealed person id among the members; ties to the lower id.
int majority_label(const Cluster& cluster);

// Share of members carrying the majority label.
double purity(const Cluster& cluster);

// Average cluster purity over the pooled clusters of all databases. For each
// ground-truth id only the largest cluster where it is the majority label is
// kept (ties: more recent last member, then lower uid); ids without any such
// cluster score 0.
double cluster_purity(std::span<const ClusterDatabase> dbs, const std::set<int>& ground_truth);

// Like cluster_purity but averages over every cluster where the id is the majority.
double normalized_purity(std::span<const ClusterDatabase> dbs, const std::set<int>& ground_truth);

struct Probe {
  int person_id = 0;
  Embedding embedding;
};

struct GalleryItem {
  ClusterUid uid;
  int label = 0;
  std::size_t db_index = 0;
  Embedding embedding;
};

struct ProbeGallery {
  std::vector<Probe> probes;
  std::vector<GalleryItem> gallery;
};

// Probes: one noise-free canonical description per person observed anywhere.
// Gallery: every cluster of every database with its majority label.
ProbeGallery build_probe_gallery(std::span<const ClusterDatabase> dbs,
                                 const std::map<int, PersonAttributes>& people,
                                 const LanguageBackend& language);

// Scores between every probe and every gallery item, the input to ranking.
struct RankingInput {
  std::vector<int> probe_labels;
  std::vector<int> gallery_labels;
  std::vector<ClusterUid> gallery_uids;
  std::vector<std::vector<double>> scores;  // [probe][gallery]
};

RankingInput ranking_input(const ProbeGallery& pg);

// Gallery order for one probe: score descending, then uid, then label.
std::vector<std::size_t> rank_gallery(const RankingInput& input, std::size_t probe);

// CMC[k-1] = share of probes whose identity appears in the top k.
std::vector<double> cmc_curve(const RankingInput& input, std::size_t k_max);
std::vector<double> cmc_curve(const ProbeGallery& pg, std::size_t k_max);

double mean_ap(const RankingInput& input);
double mean_ap(const ProbeGallery& pg);

struct MetricsReport {
  std::vector<double> cmc;
  double map_score = 0.0;
  double avg_purity = 0.0;
  double normalized_purity = 0.0;
  std::vector<int> clusters_per_robot;
  int detected_identity_count = 0;
  int ground_truth_count = 0;
  int gallery_size = 0;
  std::string config_fingerprint;

  int total_clusters() const;
  double cmc_at(std::size_t k) const;  // 1-based; saturates past the end
};

// Full evaluation. With an empty gallery, CMC and mAP are reported as zeros.
MetricsReport evaluate(std::span<const ClusterDatabase> dbs,
                       const std::map<int, PersonAttributes>& people, std::size_t k_max,
                       const LanguageBackend& language, std::string config_fingerprint = {});

void to_json(nlohmann::json& j, const MetricsReport& report);
void from_json(const nlohmann::json& j, MetricsReport& report);

// Two-column "rank,value" CSV.
std::string cmc_csv(const MetricsReport& report);

// Shortest round-trip decimal text for a double.
std::string format_double(double value);

}  // namespace textswarm
