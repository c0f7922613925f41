#include "textswarm/reid.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "textswarm/errors.hpp"

namespace textswarm {

std::string to_string(const ClusterUid& uid) {
  return std::to_string(uid.origin) + ":" + std::to_string(uid.counter);
}

std::string_view to_string(MatchMode mode) { return mode == MatchMode::kText ? "text" : "vector"; }

MatchMode parse_match_mode(std::string_view name) {
  if (name == "text") return MatchMode::kText;
  if (name == "vector") return MatchMode::kVector;
  throw ContractError("unknown match mode '" + std::string(name) + "'");
}

std::set<int> Cluster::contributors() const {
  std::set<int> out;
  for (const auto& m : members_) out.insert(m.robot_id);
  return out;
}

ClusterDatabase::ClusterDatabase(int owner, MatchMode mode,
                                 std::shared_ptr<const LanguageBackend> language,
                                 std::size_t tombstone_cap)
    : owner_(owner),
      mode_(mode),
      language_(language ? std::move(language) : reference_language()),
      tombstone_cap_(tombstone_cap) {}

const Cluster* ClusterDatabase::find(const ClusterUid& uid) const {
  const auto it = clusters_.find(uid);
  return it == clusters_.end() ? nullptr : &it->second;
}

const Embedding& ClusterDatabase::match_embedding(const Cluster& cluster) const {
  return mode_ == MatchMode::kText ? cluster.summary_embedding_ : cluster.centroid_;
}

Cluster& ClusterDatabase::create_cluster(const ClusterUid& uid) {
  auto [it, inserted] = clusters_.try_emplace(uid);
  if (!inserted) throw ContractError("cluster uid " + to_string(uid) + " already present");
  it->second.uid_ = uid;
  it->second.member_sum_.assign(language_->dimension(), 0.0);
  return it->second;
}

void ClusterDatabase::add_members(Cluster& cluster, std::vector<DescriptionRecord> records) {
  for (auto& r : records) {
    const Embedding e = language_->embed(r.tokens);
    const auto v = e.values();
    for (std::size_t i = 0; i < v.size(); ++i) cluster.member_sum_[i] += v[i];
    cluster.tally_.add(parse_description(r.text));
    cluster.track_keys_.insert(r.track());
    cluster.last_tick_ = std::max(cluster.last_tick_, r.tick);
    record_index_.emplace(r.key(), cluster.uid_);
    track_index_[r.track()].insert(cluster.uid_);
    cluster.members_.push_back(std::move(r));
  }
  refresh_summary(cluster);
}

void ClusterDatabase::index_cluster(const Cluster& cluster) {
  for (const auto& r : cluster.members_) {
    record_index_.emplace(r.key(), cluster.uid_);
    track_index_[r.track()].insert(cluster.uid_);
  }
}

void ClusterDatabase::refresh_summary(Cluster& cluster) {
  cluster.centroid_ = Embedding::normalized(cluster.member_sum_);
  std::string text = language_->summarize(cluster.tally_, cluster.members_);
  if (text == cluster.summary_text_ && !cluster.summary_embedding_.empty()) return;
  auto tokens = tokenize(text);
  if (tokens.empty()) throw EmptyDescription("summary '" + text + "' has no content tokens");
  cluster.summary_embedding_ = language_->embed(tokens);
  cluster.summary_text_ = std::move(text);
}

AssignResult ClusterDatabase::assign(DescriptionRecord record, double theta_local) {
  if (record.tokens.empty()) throw EmptyDescription("description '" + record.text + "' is empty");
  if (!(theta_local >= 0.0 && theta_local <= 1.0))
    throw ContractError("theta_local must lie in [0, 1]");
  if (record_index_.contains(record.key()))
    throw ContractError("record already assigned to this database");

  if (const auto it = track_index_.find(record.track());
      it != track_index_.end() && !it->second.empty()) {
    Cluster& target = clusters_.at(*it->second.begin());
    std::vector<DescriptionRecord> one;
    one.push_back(std::move(record));
    add_members(target, std::move(one));
    return {target.uid_, AssignResult::Route::kTrack, 0.0};
  }

  const Embedding e = language_->embed(record.tokens);
  Cluster* best = nullptr;
  double best_sim = -2.0;
  for (auto& [uid, c] : clusters_) {  // ascending uid, strict > keeps the lowest on ties
    const double sim = cosine(e, match_embedding(c));
    if (sim > best_sim) {
      best_sim = sim;
      best = &c;
    }
  }

  std::vector<DescriptionRecord> one;
  one.push_back(std::move(record));
  if (best != nullptr && best_sim >= theta_local) {
    add_members(*best, std::move(one));
    return {best->uid_, AssignResult::Route::kSimilarity, best_sim};
  }
  Cluster& fresh = create_cluster({owner_, uid_counter_++});
  add_members(fresh, std::move(one));
  return {fresh.uid_, AssignResult::Route::kCreated, best != nullptr ? best_sim : 0.0};
}

Cluster* ClusterDatabase::resolve_tombstone(const ClusterUid& uid) {
  ClusterUid cur = uid;
  for (std::size_t hops = 0; hops <= tombstones_.size(); ++hops) {
    const auto t = tombstones_.find(cur);
    if (t == tombstones_.end()) return nullptr;
    cur = t->second;
    if (auto c = clusters_.find(cur); c != clusters_.end()) return &c->second;
  }
  return nullptr;
}

void ClusterDatabase::record_tombstone(const ClusterUid& absorbed, const ClusterUid& into) {
  if (tombstone_cap_ == 0) return;
  auto [it, inserted] = tombstones_.insert_or_assign(absorbed, into);
  (void)it;
  if (inserted) tombstone_order_.push_back(absorbed);
  while (tombstones_.size() > tombstone_cap_) {
    tombstones_.erase(tombstone_order_.front());
    tombstone_order_.pop_front();
  }
}

AbsorbResult ClusterDatabase::absorb(const ClusterDatabase& snapshot, double theta_merge) {
  if (snapshot.owner_ == owner_) throw ContractError("exchange requires two different owners");
  if (snapshot.mode_ != mode_) throw ContractError("exchange between databases of different modes");
  if (snapshot.language_->dimension() != language_->dimension())
    throw ContractError("exchange between databases of different embedding dimensions");
  if (!(theta_merge >= 0.0 && theta_merge <= 1.0))
    throw ContractError("theta_merge must lie in [0, 1]");

  AbsorbResult result;
  for (const auto& [uid, received] : snapshot.clusters_) {
    std::vector<DescriptionRecord> fresh;
    for (const auto& r : received.members_)
      if (!record_index_.contains(r.key())) fresh.push_back(r);
    if (fresh.empty()) continue;

    Cluster* target = nullptr;
    if (auto it = clusters_.find(uid); it != clusters_.end()) {
      target = &it->second;
    } else if (Cluster* t = resolve_tombstone(uid)) {
      target = t;
    } else {
      const Embedding& probe = snapshot.match_embedding(received);
      double best_sim = -2.0;
      for (auto& [local_uid, c] : clusters_) {
        const double sim = cosine(probe, match_embedding(c));
        if (sim > best_sim) {
          best_sim = sim;
          target = &c;
        }
      }
      if (target != nullptr && best_sim < theta_merge) target = nullptr;
    }

    const std::size_t added = fresh.size();
    result.records_added += added;
    if (target != nullptr) {
      add_members(*target, std::move(fresh));
      if (target->uid_ != uid) record_tombstone(uid, target->uid_);
      result.merged.push_back({uid, target->uid_, added});
    } else if (added == received.members_.size()) {
      Cluster& copy = clusters_.emplace(uid, received).first->second;
      index_cluster(copy);
      result.copied.push_back(uid);
    } else {
      // Part of the cluster is already held elsewhere locally; copy the rest.
      Cluster& copy = create_cluster(uid);
      add_members(copy, std::move(fresh));
      result.copied.push_back(uid);
    }
  }
  return result;
}

ExchangeResult exchange(ClusterDatabase& a, ClusterDatabase& b, double theta_merge) {
  if (a.owner() == b.owner()) throw ContractError("exchange requires two different owners");
  const ClusterDatabase a_before = a;
  ExchangeResult out;
  out.into_a = a.absorb(b, theta_merge);
  out.into_b = b.absorb(a_before, theta_merge);
  return out;
}

std::vector<QueryHit> ClusterDatabase::query(std::string_view text, std::size_t k) const {
  if (k < 1) throw ContractError("query requires k >= 1");
  const auto tokens = tokenize(text);
  if (tokens.empty())
    throw EmptyDescription("query '" + std::string(text) + "' contains only stopwords");
  if (clusters_.empty()) return {};
  const Embedding q = language_->embed(tokens);

  std::vector<std::pair<double, const Cluster*>> scored;
  scored.reserve(clusters_.size());
  for (const auto& [uid, c] : clusters_) scored.emplace_back(cosine(q, match_embedding(c)), &c);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  scored.resize(std::min(k, scored.size()));

  std::vector<QueryHit> hits;
  for (const auto& [score, c] : scored) {
    QueryHit hit{c->uid_, score, c->summary_text_, {}};
    std::vector<const DescriptionRecord*> recent;
    for (const auto& m : c->members_) recent.push_back(&m);
    std::sort(recent.begin(), recent.end(), [](const auto* x, const auto* y) {
      if (x->tick != y->tick) return x->tick > y->tick;
      return std::pair(x->robot_id, x->track_id) < std::pair(y->robot_id, y->track_id);
    });
    for (std::size_t i = 0; i < recent.size() && i < 3; ++i) hit.samples.push_back(*recent[i]);
    hits.push_back(std::move(hit));
  }
  return hits;
}

bool ClusterDatabase::same_state(const ClusterDatabase& other) const {
  if (owner_ != other.owner_ || uid_counter_ != other.uid_counter_ || mode_ != other.mode_ ||
      clusters_.size() != other.clusters_.size() || tombstones_ != other.tombstones_)
    return false;
  for (const auto& [uid, c] : clusters_) {
    const Cluster* o = other.find(uid);
    if (o == nullptr || o->summary_text_ != c.summary_text_ || o->members_.size() != c.members_.size())
      return false;
    for (std::size_t i = 0; i < c.members_.size(); ++i)
      if (!same_record(c.members_[i], o->members_[i])) return false;
  }
  return true;
}

nlohmann::json ClusterDatabase::to_json() const {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& [uid, c] : clusters_) {
    clusters.push_back({{"uid", {uid.origin, uid.counter}},
                        {"summary", c.summary_text_},
                        {"members", c.members_}});
  }
  nlohmann::json tombstones = nlohmann::json::array();
  for (const auto& uid : tombstone_order_) {
    const auto& into = tombstones_.at(uid);
    tombstones.push_back({{"absorbed", {uid.origin, uid.counter}}, {"into", {into.origin, into.counter}}});
  }
  return {{"format", "textswarm-cluster-db"},
          {"version", kSnapshotFormatVersion},
          {"owner", owner_},
          {"mode", std::string(to_string(mode_))},
          {"embedding_dim", language_->dimension()},
          {"uid_counter", uid_counter_},
          {"tombstone_cap", tombstone_cap_},
          {"tombstones", tombstones},
          {"clusters", clusters}};
}

ClusterDatabase ClusterDatabase::from_json(const nlohmann::json& doc,
                                           std::shared_ptr<const LanguageBackend> language) {
  if (doc.value("format", std::string{}) != "textswarm-cluster-db" ||
      doc.value("version", 0) != kSnapshotFormatVersion)
    throw ContractError("not a version " + std::to_string(kSnapshotFormatVersion) +
                        " cluster database snapshot");
  const auto dim = doc.at("embedding_dim").get<std::size_t>();
  if (!language) language = reference_language(dim);
  if (language->dimension() != dim) throw ContractError("snapshot embedding dimension mismatch");

  ClusterDatabase db(doc.at("owner").get<int>(), parse_match_mode(doc.at("mode").get<std::string>()),
                     std::move(language), doc.at("tombstone_cap").get<std::size_t>());
  db.uid_counter_ = doc.at("uid_counter").get<int>();
  auto uid_of = [](const nlohmann::json& j) { return ClusterUid{j.at(0).get<int>(), j.at(1).get<int>()}; };
  for (const auto& cj : doc.at("clusters")) {
    Cluster& c = db.create_cluster(uid_of(cj.at("uid")));
    for (const auto& mj : cj.at("members")) {
      DescriptionRecord r = record_from_json(mj);
      if (db.record_index_.contains(r.key())) throw ContractError("snapshot repeats a record");
      const Embedding e = db.language_->embed(r.tokens);
      for (std::size_t i = 0; i < e.dim(); ++i) c.member_sum_[i] += e.values()[i];
      c.tally_.add(parse_description(r.text));
      c.track_keys_.insert(r.track());
      c.last_tick_ = std::max(c.last_tick_, r.tick);
      c.members_.push_back(std::move(r));
    }
    if (c.members_.empty()) throw ContractError("snapshot contains an empty cluster");
    db.index_cluster(c);
    // Keep the stored summary: it may come from a remote summarizer.
    c.summary_text_ = cj.at("summary").get<std::string>();
    auto tokens = tokenize(c.summary_text_);
    if (tokens.empty()) throw EmptyDescription("snapshot summary has no content tokens");
    c.summary_embedding_ = db.language_->embed(tokens);
    c.centroid_ = Embedding::normalized(c.member_sum_);
  }
  for (const auto& tj : doc.at("tombstones")) db.record_tombstone(uid_of(tj.at("absorbed")), uid_of(tj.at("into")));
  return db;
}

}  // namespace textswarm
