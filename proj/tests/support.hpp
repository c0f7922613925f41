#pragma once

// Generators and oracles shared by unit and acceptance tests.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "textswarm/perception.hpp"
#include "textswarm/reid.hpp"

namespace textswarm::testing {

// Multiset of records held by a database, keyed by identity.
inline std::multiset<std::tuple<int, int, int, std::string>> member_multiset(const ClusterDatabase& db) {
  std::multiset<std::tuple<int, int, int, std::string>> out;
  for (const auto& [uid, c] : db.clusters())
    for (const auto& m : c.members()) out.emplace(m.robot_id, m.track_id, m.tick, m.text);
  return out;
}

inline std::set<RecordKey> record_keys(const ClusterDatabase& db) {
  std::set<RecordKey> out;
  for (const auto& [uid, c] : db.clusters())
    for (const auto& m : c.members()) out.insert(m.key());
  return out;
}

// Count of clusters each record key appears in; a correct database has all ones.
inline bool each_record_once(const ClusterDatabase& db) {
  std::map<RecordKey, int> seen;
  for (const auto& [uid, c] : db.clusters())
    for (const auto& m : c.members())
      if (++seen[m.key()] > 1) return false;
  return true;
}

inline bool summaries_fresh(const ClusterDatabase& db) {
  for (const auto& [uid, c] : db.clusters())
    if (c.summary_text() != db.language().summarize(c.members())) return false;
  return true;
}

// Feeds a robot's database with noisy descriptions of a small population so
// that clusters form, fragment and sometimes mix.
struct Population {
  std::vector<PersonAttributes> people;
  NoiseParams noise;

  static Population random(Rng& rng, std::size_t n, NoiseParams noise) {
    Population p;
    for (std::size_t i = 0; i < n; ++i) p.people.push_back(sample_attributes(rng, 0.4));
    p.noise = noise;
    return p;
  }

  // `count` observations on fresh or continuing tracks starting at `tick`.
  void observe(ClusterDatabase& db, Rng& rng, int count, int& next_track, int& tick, double theta) const {
    int track = next_track++;
    std::size_t person = rng.below(people.size());
    for (int i = 0; i < count; ++i) {
      if (rng.bernoulli(0.3)) {
        track = next_track++;
        person = rng.below(people.size());
      }
      db.assign(make_record(describe(people[person], noise, rng), db.owner(), tick++, track,
                            SealedPersonId(static_cast<int>(person))),
                theta);
    }
  }
};

}  // namespace textswarm::testing
