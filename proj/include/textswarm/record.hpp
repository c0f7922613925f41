#pragma once

#include <compare>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace textswarm {

// Ground-truth identity attached to an observation for evaluation only.
// Deliberately not comparable or hashable: algorithmic code has nothing to do
// with it except carry it along.
class SealedPersonId {
 public:
  constexpr explicit SealedPersonId(int id) : id_(id) {}
  constexpr int reveal() const { return id_; }

 private:
  int id_;
};

struct RecordKey {
  int robot_id = 0;
  int track_id = 0;
  int tick = 0;

  friend auto operator<=>(const RecordKey&, const RecordKey&) = default;
};

struct TrackKey {
  int robot_id = 0;
  int track_id = 0;

  friend auto operator<=>(const TrackKey&, const TrackKey&) = default;
};

// One textual observation of a tracked person.
struct DescriptionRecord {
  std::string text;
  std::vector<std::string> tokens;
  int robot_id = 0;
  int tick = 0;
  int track_id = 0;
  SealedPersonId person{-1};

  RecordKey key() const { return {robot_id, track_id, tick}; }
  TrackKey track() const { return {robot_id, track_id}; }
};

// Builds a record with tokens = tokenize(text).
DescriptionRecord make_record(std::string text, int robot_id, int tick, int track_id,
                              SealedPersonId person);

bool same_record(const DescriptionRecord& a, const DescriptionRecord& b);

void to_json(nlohmann::json& j, const DescriptionRecord& r);
DescriptionRecord record_from_json(const nlohmann::json& j);

}  // namespace textswarm
