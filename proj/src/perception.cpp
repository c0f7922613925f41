#include "textswarm/perception.hpp"

#include <string>

#include "textswarm/description_template.hpp"
#include "textswarm/errors.hpp"
#include "textswarm/language.hpp"

namespace textswarm {

int TrackTable::open(int person_id, int tick) {
  const int id = static_cast<int>(tracks_.size());
  tracks_.push_back(Track{id, person_id, tick, tick, -1, true});
  active_by_person_[person_id] = id;
  return id;
}

void TrackTable::close(Track& track) {
  track.active = false;
  active_by_person_.erase(track.person_id);
}

std::vector<TrackAssignment> TrackTable::update(std::span<const int> visible, int tick,
                                                const TrackParams& params, Rng& rng) {
  if (started_ && tick <= last_tick_)
    throw ContractError("TrackTable::update: ticks must strictly increase");
  started_ = true;
  last_tick_ = tick;

  for (Track& t : tracks_)
    if (t.active && tick - t.last_seen_tick > params.max_gap_ticks) close(t);

  std::vector<TrackAssignment> out;
  out.reserve(visible.size());
  for (int person : visible) {
    if (auto it = active_by_person_.find(person); it != active_by_person_.end()) {
      Track& t = tracks_[static_cast<std::size_t>(it->second)];
      if (t.last_seen_tick == tick)
        throw ContractError("TrackTable::update: person listed twice in one tick");
      if (!rng.bernoulli(params.p_track_break)) {
        t.last_seen_tick = tick;
        out.push_back({t.track_id, person, false});
        continue;
      }
      close(t);
    }
    out.push_back({open(person, tick), person, true});
  }
  return out;
}

void TrackTable::mark_described(int track_id, int tick) {
  tracks_.at(static_cast<std::size_t>(track_id)).last_described_tick = tick;
}

bool NoiseParams::valid() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  return prob(p_drop) && prob(p_synonym) && prob(p_color_confusion);
}

namespace {

std::string swap_from(const std::map<std::string, std::vector<std::string>>& table,
                      const std::string& word, double p, Rng& rng) {
  if (!rng.bernoulli(p)) return word;
  const auto it = table.find(word);
  if (it == table.end() || it->second.empty()) return word;
  return it->second[rng.below(it->second.size())];
}

DescriptionSlots noisy_slots(const PersonAttributes& a, const NoiseParams& noise, Rng& rng) {
  const auto& tables = noise_tables();
  auto synonym = [&](const std::string& w) { return swap_from(tables.synonyms, w, noise.p_synonym, rng); };
  auto confuse = [&](const std::string& c) {
    return swap_from(tables.color_confusion, c, noise.p_color_confusion, rng);
  };
  auto kept = [&] { return !rng.bernoulli(noise.p_drop); };

  DescriptionSlots s;
  s.noun = synonym(a.noun);
  if (kept()) s.upper_color = confuse(a.upper.color);
  if (kept()) s.upper_type = synonym(a.upper.type);
  if (a.lower.type != vocab::kNone) {
    if (kept()) s.lower_color = confuse(a.lower.color);
    if (kept()) s.lower_type = synonym(a.lower.type);
  }
  for (const auto& acc : a.accessories)
    if (kept()) s.accessories.push_back(acc);
  if (a.hair_color != vocab::kNone && kept()) s.hair_color = confuse(a.hair_color);
  return s;
}

}  // namespace

std::string canonical_description(const PersonAttributes& a) {
  validate(a);
  DescriptionSlots s;
  s.noun = a.noun;
  s.upper_color = a.upper.color;
  s.upper_type = a.upper.type;
  if (a.lower.type != vocab::kNone) {
    s.lower_color = a.lower.color;
    s.lower_type = a.lower.type;
  }
  s.accessories = a.accessories;
  if (a.hair_color != vocab::kNone) s.hair_color = a.hair_color;
  return render_description(s);
}

std::string describe(const PersonAttributes& attributes, const NoiseParams& noise, Rng& rng) {
  validate(attributes);
  if (!noise.valid()) throw ContractError("noise probabilities must lie in [0, 1]");
  return render_description(noisy_slots(attributes, noise, rng));
}

Describer reference_describer() {
  return [](const PersonAttributes& a, const NoiseParams& n, Rng& rng) { return describe(a, n, rng); };
}

PersonAttributes sample_attributes(Rng& rng, double accessory_rate) {
  auto pick = [&](const auto& words) { return std::string(words[rng.below(words.size())]); };
  PersonAttributes a;
  a.noun = pick(vocab::kNouns);
  a.upper.type = pick(vocab::kUpperTypes);
  a.upper.color = pick(vocab::kPalette);
  // "none" (the last lower type) only goes with a dress.
  const std::size_t lower_choices = vocab::kLowerTypes.size() - (a.upper.type == "dress" ? 0 : 1);
  a.lower.type = std::string(vocab::kLowerTypes[rng.below(lower_choices)]);
  if (a.lower.type != vocab::kNone) a.lower.color = pick(vocab::kPalette);
  for (auto acc : vocab::kAccessories)
    if (rng.bernoulli(accessory_rate)) a.accessories.emplace_back(acc);
  const std::size_t hair = rng.below(vocab::kPalette.size() + 1);
  a.hair_color = hair < vocab::kPalette.size() ? std::string(vocab::kPalette[hair])
                                               : std::string(vocab::kNone);
  return a;
}

std::vector<PersonAttributes> sample_distinct_outfits(std::size_t n, double max_similarity,
                                                      Rng& rng, double accessory_rate) {
  constexpr int kAttemptBudget = 200000;
  std::vector<PersonAttributes> out;
  std::vector<Embedding> embeddings;
  int attempts = 0;
  while (out.size() < n) {
    if (++attempts > kAttemptBudget)
      throw ConfigError({"people.count", "people.distinct_max_similarity"},
                        "could not sample " + std::to_string(n) +
                            " outfits with pairwise similarity <= " + std::to_string(max_similarity));
    PersonAttributes candidate = sample_attributes(rng, accessory_rate);
    Embedding e = embed(tokenize(canonical_description(candidate)));
    bool ok = true;
    for (const auto& other : embeddings) {
      if (cosine(e, other) > max_similarity) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    out.push_back(std::move(candidate));
    embeddings.push_back(std::move(e));
  }
  return out;
}

}  // namespace textswarm
