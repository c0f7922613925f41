#include "textswarm/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <tuple>

#include <nlohmann/json.hpp>

#include "textswarm/errors.hpp"
#include "textswarm/perception.hpp"

namespace textswarm {

int majority_label(const Cluster& cluster) {
  if (cluster.members().empty()) throw EmptyCluster("cluster has no members");
  std::map<int, int> counts;
  for (const auto& m : cluster.members()) ++counts[m.person.reveal()];
  int best = 0, best_count = 0;
  for (const auto& [id, n] : counts) {
    if (n > best_count) {
      best = id;
      best_count = n;
    }
  }
  return best;
}

double purity(const Cluster& cluster) {
  const int label = majority_label(cluster);
  const auto n = std::count_if(cluster.members().begin(), cluster.members().end(),
                               [&](const auto& m) { return m.person.reveal() == label; });
  return static_cast<double>(n) / static_cast<double>(cluster.size());
}

namespace {

struct Candidate {
  std::size_t size;
  int last_tick;
  ClusterUid uid;
  double purity;
};

// Majority-labelled clusters of every database, grouped by label.
std::map<int, std::vector<Candidate>> candidates_by_label(std::span<const ClusterDatabase> dbs) {
  std::map<int, std::vector<Candidate>> out;
  for (const auto& db : dbs)
    for (const auto& [uid, c] : db.clusters())
      out[majority_label(c)].push_back({c.size(), c.last_tick(), uid, purity(c)});
  return out;
}

void require_ground_truth(const std::set<int>& gt) {
  if (gt.empty()) throw ContractError("purity needs a non-empty ground-truth id set");
}

}  // namespace

double cluster_purity(std::span<const ClusterDatabase> dbs, const std::set<int>& ground_truth) {
  require_ground_truth(ground_truth);
  const auto by_label = candidates_by_label(dbs);
  double total = 0.0;
  for (int id : ground_truth) {
    const auto it = by_label.find(id);
    if (it == by_label.end()) continue;
    // Largest, then most recent, then lowest uid; identical copies resolve on purity.
    const auto& best = *std::min_element(it->second.begin(), it->second.end(),
                                         [](const Candidate& a, const Candidate& b) {
                                           return std::tuple(-static_cast<long>(a.size), -a.last_tick, a.uid, -a.purity) <
                                                  std::tuple(-static_cast<long>(b.size), -b.last_tick, b.uid, -b.purity);
                                         });
    total += best.purity;
  }
  return total / static_cast<double>(ground_truth.size());
}

double normalized_purity(std::span<const ClusterDatabase> dbs, const std::set<int>& ground_truth) {
  require_ground_truth(ground_truth);
  const auto by_label = candidates_by_label(dbs);
  double total = 0.0;
  for (int id : ground_truth) {
    const auto it = by_label.find(id);
    if (it == by_label.end()) continue;
    std::vector<double> values;
    for (const auto& c : it->second) values.push_back(c.purity);
    std::sort(values.begin(), values.end());  // order-independent sum
    total += std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  return total / static_cast<double>(ground_truth.size());
}

ProbeGallery build_probe_gallery(std::span<const ClusterDatabase> dbs,
                                 const std::map<int, PersonAttributes>& people,
                                 const LanguageBackend& language) {
  ProbeGallery pg;
  std::set<int> seen;
  for (std::size_t i = 0; i < dbs.size(); ++i) {
    for (const auto& [uid, c] : dbs[i].clusters()) {
      for (const auto& m : c.members()) seen.insert(m.person.reveal());
      pg.gallery.push_back({uid, majority_label(c), i, dbs[i].match_embedding(c)});
    }
  }
  for (int id : seen) {
    const auto it = people.find(id);
    if (it == people.end()) continue;
    pg.probes.push_back({id, language.embed(tokenize(canonical_description(it->second)))});
  }
  return pg;
}

RankingInput ranking_input(const ProbeGallery& pg) {
  RankingInput in;
  for (const auto& g : pg.gallery) {
    in.gallery_labels.push_back(g.label);
    in.gallery_uids.push_back(g.uid);
  }
  for (const auto& p : pg.probes) {
    in.probe_labels.push_back(p.person_id);
    auto& row = in.scores.emplace_back();
    for (const auto& g : pg.gallery) row.push_back(cosine(p.embedding, g.embedding));
  }
  return in;
}

namespace {

void check_input(const RankingInput& in) {
  if (in.gallery_labels.empty()) throw ContractError("ranking requires a non-empty gallery");
  if (in.gallery_uids.size() != in.gallery_labels.size() || in.scores.size() != in.probe_labels.size())
    throw ContractError("ranking input sizes disagree");
  for (const auto& row : in.scores)
    if (row.size() != in.gallery_labels.size()) throw ContractError("ranking score row has wrong length");
}

}  // namespace

std::vector<std::size_t> rank_gallery(const RankingInput& in, std::size_t probe) {
  const auto& s = in.scores.at(probe);
  std::vector<std::size_t> order(in.gallery_labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s[a] != s[b]) return s[a] > s[b];
    if (in.gallery_uids[a] != in.gallery_uids[b]) return in.gallery_uids[a] < in.gallery_uids[b];
    return in.gallery_labels[a] < in.gallery_labels[b];
  });
  return order;
}

std::vector<double> cmc_curve(const RankingInput& in, std::size_t k_max) {
  check_input(in);
  if (k_max < 1) throw ContractError("cmc_curve requires k_max >= 1");
  std::vector<std::size_t> hits(k_max, 0);
  for (std::size_t p = 0; p < in.probe_labels.size(); ++p) {
    const auto order = rank_gallery(in, p);
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (in.gallery_labels[order[r]] != in.probe_labels[p]) continue;
      for (std::size_t k = r; k < k_max; ++k) ++hits[k];
      break;
    }
  }
  std::vector<double> cmc(k_max, 0.0);
  if (in.probe_labels.empty()) return cmc;
  for (std::size_t k = 0; k < k_max; ++k)
    cmc[k] = static_cast<double>(hits[k]) / static_cast<double>(in.probe_labels.size());
  return cmc;
}

std::vector<double> cmc_curve(const ProbeGallery& pg, std::size_t k_max) {
  return cmc_curve(ranking_input(pg), k_max);
}

double mean_ap(const RankingInput& in) {
  check_input(in);
  if (in.probe_labels.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t p = 0; p < in.probe_labels.size(); ++p) {
    const auto order = rank_gallery(in, p);
    double sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (in.gallery_labels[order[r]] != in.probe_labels[p]) continue;
      ++correct;
      sum += static_cast<double>(correct) / static_cast<double>(r + 1);
    }
    if (correct > 0) total += sum / static_cast<double>(correct);
  }
  return total / static_cast<double>(in.probe_labels.size());
}

double mean_ap(const ProbeGallery& pg) { return mean_ap(ranking_input(pg)); }

int MetricsReport::total_clusters() const {
  return std::accumulate(clusters_per_robot.begin(), clusters_per_robot.end(), 0);
}

double MetricsReport::cmc_at(std::size_t k) const {
  if (cmc.empty() || k == 0) return 0.0;
  return cmc[std::min(k, cmc.size()) - 1];
}

MetricsReport evaluate(std::span<const ClusterDatabase> dbs,
                       const std::map<int, PersonAttributes>& people, std::size_t k_max,
                       const LanguageBackend& language, std::string config_fingerprint) {
  MetricsReport report;
  report.config_fingerprint = std::move(config_fingerprint);
  for (const auto& db : dbs) report.clusters_per_robot.push_back(static_cast<int>(db.clusters().size()));

  const ProbeGallery pg = build_probe_gallery(dbs, people, language);
  report.detected_identity_count = static_cast<int>(pg.probes.size());
  report.gallery_size = static_cast<int>(pg.gallery.size());
  report.ground_truth_count = static_cast<int>(people.size());
  if (pg.gallery.empty()) {
    report.cmc.assign(k_max, 0.0);
  } else {
    const RankingInput in = ranking_input(pg);
    report.cmc = cmc_curve(in, k_max);
    report.map_score = mean_ap(in);
  }

  std::set<int> gt;
  for (const auto& [id, attrs] : people) gt.insert(id);
  if (!gt.empty()) {
    report.avg_purity = cluster_purity(dbs, gt);
    report.normalized_purity = normalized_purity(dbs, gt);
  }
  return report;
}

void to_json(nlohmann::json& j, const MetricsReport& r) {
  j = nlohmann::json{{"cmc", r.cmc},
                     {"map", r.map_score},
                     {"avg_purity", r.avg_purity},
                     {"normalized_purity", r.normalized_purity},
                     {"clusters_per_robot", r.clusters_per_robot},
                     {"total_clusters", r.total_clusters()},
                     {"detected_identity_count", r.detected_identity_count},
                     {"ground_truth_count", r.ground_truth_count},
                     {"gallery_size", r.gallery_size},
                     {"config_fingerprint", r.config_fingerprint}};
}

void from_json(const nlohmann::json& j, MetricsReport& r) {
  r.cmc = j.at("cmc").get<std::vector<double>>();
  r.map_score = j.at("map").get<double>();
  r.avg_purity = j.at("avg_purity").get<double>();
  r.normalized_purity = j.at("normalized_purity").get<double>();
  r.clusters_per_robot = j.at("clusters_per_robot").get<std::vector<int>>();
  r.detected_identity_count = j.at("detected_identity_count").get<int>();
  r.ground_truth_count = j.value("ground_truth_count", 0);
  r.gallery_size = j.value("gallery_size", 0);
  r.config_fingerprint = j.value("config_fingerprint", std::string{});
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string cmc_csv(const MetricsReport& report) {
  std::string out = "rank,value\n";
  for (std::size_t k = 0; k < report.cmc.size(); ++k)
    out += std::to_string(k + 1) + "," + format_double(report.cmc[k]) + "\n";
  return out;
}

}  // namespace textswarm
