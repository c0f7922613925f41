#pragma once

#include <compare>
#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "textswarm/description_template.hpp"
#include "textswarm/language.hpp"
#include "textswarm/record.hpp"

namespace textswarm {

// (origin robot, origin-local counter). Stable across exchanges.
struct ClusterUid {
  int origin = 0;
  int counter = 0;

  friend auto operator<=>(const ClusterUid&, const ClusterUid&) = default;
};

std::string to_string(const ClusterUid& uid);

// Text mode matches on summary embeddings; vector mode matches on the
// normalized centroid of member embeddings (baseline for trend comparison).
enum class MatchMode { kText, kVector };

std::string_view to_string(MatchMode mode);
MatchMode parse_match_mode(std::string_view name);

// A hypothesized individual.
class Cluster {
 public:
  const ClusterUid& uid() const { return uid_; }
  const std::vector<DescriptionRecord>& members() const { return members_; }
  const std::string& summary_text() const { return summary_text_; }
  const Embedding& summary_embedding() const { return summary_embedding_; }
  const Embedding& centroid() const { return centroid_; }
  const std::set<TrackKey>& track_keys() const { return track_keys_; }
  const SlotTally& tally() const { return tally_; }
  std::set<int> contributors() const;
  int last_tick() const { return last_tick_; }
  std::size_t size() const { return members_.size(); }

 private:
  friend class ClusterDatabase;

  ClusterUid uid_;
  std::vector<DescriptionRecord> members_;
  SlotTally tally_;
  std::string summary_text_;
  Embedding summary_embedding_;
  std::vector<double> member_sum_;
  Embedding centroid_;
  std::set<TrackKey> track_keys_;
  int last_tick_ = -1;
};

struct AssignResult {
  enum class Route { kTrack, kSimilarity, kCreated };

  ClusterUid uid;
  Route route = Route::kCreated;
  double similarity = 0.0;  // best similarity seen (0 when routed by track)
};

struct MergeEvent {
  ClusterUid received;
  ClusterUid into;
  std::size_t records_added = 0;
};

struct AbsorbResult {
  std::vector<MergeEvent> merged;
  std::vector<ClusterUid> copied;
  std::size_t records_added = 0;
};

struct ExchangeResult {
  AbsorbResult into_a;
  AbsorbResult into_b;
};

struct QueryHit {
  ClusterUid uid;
  double score = 0.0;
  std::string summary;
  std::vector<DescriptionRecord> samples;  // up to three, most recent first
};

inline constexpr std::size_t kDefaultTombstoneCap = 4096;

// One robot's local collection of clusters.
class ClusterDatabase {
 public:
  explicit ClusterDatabase(int owner, MatchMode mode = MatchMode::kText,
                           std::shared_ptr<const LanguageBackend> language = nullptr,
                           std::size_t tombstone_cap = kDefaultTombstoneCap);

  int owner() const { return owner_; }
  MatchMode mode() const { return mode_; }
  int uid_counter() const { return uid_counter_; }
  std::size_t tombstone_cap() const { return tombstone_cap_; }
  const LanguageBackend& language() const { return *language_; }
  const std::shared_ptr<const LanguageBackend>& language_ptr() const { return language_; }

  const std::map<ClusterUid, Cluster>& clusters() const { return clusters_; }
  const Cluster* find(const ClusterUid& uid) const;
  std::size_t record_count() const { return record_index_.size(); }
  bool contains(const RecordKey& key) const { return record_index_.contains(key); }
  // Absorbed uid -> local uid it was merged into (bounded by the tombstone cap).
  const std::map<ClusterUid, ClusterUid>& tombstones() const { return tombstones_; }

  // Embedding used for matching under the database's mode.
  const Embedding& match_embedding(const Cluster& cluster) const;

  // Track-consistent join, else best summary similarity >= theta_local
  // (ties to the lowest uid), else a new singleton cluster.
  AssignResult assign(DescriptionRecord record, double theta_local);

  // One direction of an exchange: folds a peer snapshot into this database.
  // Received clusters are visited in ascending uid order; records already held
  // locally are skipped, a known uid (directly or via tombstone) is merged into
  // its local counterpart, otherwise the best match >= theta_merge absorbs it,
  // otherwise it is copied in under its original uid.
  AbsorbResult absorb(const ClusterDatabase& snapshot, double theta_merge);

  // Clusters ranked by similarity to the query text, descending, ties to the lowest uid.
  std::vector<QueryHit> query(std::string_view text, std::size_t k) const;

  // Same owner, counter, clusters (uid, members, summary) and tombstones.
  bool same_state(const ClusterDatabase& other) const;

  // Canonical, versioned snapshot document.
  nlohmann::json to_json() const;
  static ClusterDatabase from_json(const nlohmann::json& doc,
                                   std::shared_ptr<const LanguageBackend> language = nullptr);

 private:
  Cluster& create_cluster(const ClusterUid& uid);
  void add_members(Cluster& cluster, std::vector<DescriptionRecord> records);
  void index_cluster(const Cluster& cluster);
  void refresh_summary(Cluster& cluster);
  Cluster* resolve_tombstone(const ClusterUid& uid);
  void record_tombstone(const ClusterUid& absorbed, const ClusterUid& into);

  int owner_;
  MatchMode mode_;
  std::shared_ptr<const LanguageBackend> language_;
  std::size_t tombstone_cap_;
  int uid_counter_ = 0;
  std::map<ClusterUid, Cluster> clusters_;
  std::map<RecordKey, ClusterUid> record_index_;
  std::map<TrackKey, std::set<ClusterUid>> track_index_;
  std::map<ClusterUid, ClusterUid> tombstones_;
  std::deque<ClusterUid> tombstone_order_;
};

// Pairwise exchange: both sides absorb the other's pre-exchange snapshot.
ExchangeResult exchange(ClusterDatabase& a, ClusterDatabase& b, double theta_merge);

inline constexpr int kSnapshotFormatVersion = 1;

}  // namespace textswarm
