#pragma once

#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "textswarm/rng.hpp"
#include "textswarm/vocabulary.hpp"

namespace textswarm {

struct TrackParams {
  int max_gap_ticks = 20;
  double p_track_break = 0.0;
};

struct Track {
  int track_id = 0;
  int person_id = 0;  // sealed ground truth; bookkeeping only
  int first_tick = 0;
  int last_seen_tick = 0;
  int last_described_tick = -1;
  bool active = true;
};

struct TrackAssignment {
  int track_id = 0;
  int person_id = 0;
  bool fresh = false;  // track opened on this tick
};

// Robot-local tracker model: a perfect detector with gap- and break-driven
// track loss. Track ids are never reused and a closed track never reopens.
class TrackTable {
 public:
  // `visible` is processed in the given order; tick must strictly increase.
  std::vector<TrackAssignment> update(std::span<const int> visible, int tick,
                                      const TrackParams& params, Rng& rng);

  void mark_described(int track_id, int tick);

  const std::vector<Track>& tracks() const { return tracks_; }
  const Track& track(int track_id) const { return tracks_.at(static_cast<std::size_t>(track_id)); }

 private:
  int open(int person_id, int tick);
  void close(Track& track);

  std::vector<Track> tracks_;  // indexed by track_id
  std::unordered_map<int, int> active_by_person_;
  int last_tick_ = 0;
  bool started_ = false;
};

struct NoiseParams {
  double p_drop = 0.0;             // per optional slot
  double p_synonym = 0.0;          // per noun/garment word
  double p_color_confusion = 0.0;  // per color word

  bool valid() const;
};

// Noise-free rendering of a person's appearance.
std::string canonical_description(const PersonAttributes& attributes);

// Template description with slot dropout, synonym swaps, and adjacent-color
// confusion. The noun is never dropped.
std::string describe(const PersonAttributes& attributes, const NoiseParams& noise, Rng& rng);

using Describer =
    std::function<std::string(const PersonAttributes&, const NoiseParams&, Rng&)>;

// The built-in deterministic describer.
Describer reference_describer();

// Uniform draw over the vocabularies; each accessory present with `accessory_rate`.
PersonAttributes sample_attributes(Rng& rng, double accessory_rate = 0.3);

// n outfits whose canonical descriptions pairwise have cosine <= max_similarity.
// Throws ConfigError when no such set is found within the attempt budget.
std::vector<PersonAttributes> sample_distinct_outfits(std::size_t n, double max_similarity,
                                                      Rng& rng, double accessory_rate = 0.3);

}  // namespace textswarm
