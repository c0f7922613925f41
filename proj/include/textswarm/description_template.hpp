#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace textswarm {

// Slot view of a description rendered by the canonical template
//   "a <noun> wearing a <color> <upper> and <color> <lower>[, with <accessories>][, <hair> hair]"
// Unset slots were not mentioned.
struct DescriptionSlots {
  std::optional<std::string> noun;
  std::optional<std::string> upper_color;
  std::optional<std::string> upper_type;
  std::optional<std::string> lower_color;
  std::optional<std::string> lower_type;
  std::vector<std::string> accessories;  // canonical vocabulary order
  std::optional<std::string> hair_color;

  friend bool operator==(const DescriptionSlots&, const DescriptionSlots&) = default;
};

std::string render_description(const DescriptionSlots& slots);

// Reads slot values back out of free text by word class. Unknown words are
// ignored, so text from external describers degrades gracefully.
DescriptionSlots parse_description(std::string_view text);

// Per-slot value counts over a set of descriptions; the consensus summary is a
// pure function of these counts.
class SlotTally {
 public:
  void add(const DescriptionSlots& slots);
  void merge(const SlotTally& other);

  int member_count() const { return members_; }

  // Plurality value per slot (ties to the lexicographically smallest value);
  // a slot mentioned by fewer than ceil(members / 4) descriptions is omitted.
  DescriptionSlots consensus() const;
  std::string render() const { return render_description(consensus()); }

  friend bool operator==(const SlotTally&, const SlotTally&) = default;

 private:
  using Counts = std::map<std::string, int>;
  int members_ = 0;
  Counts noun_;
  Counts upper_color_;
  Counts upper_type_;
  Counts lower_color_;
  Counts lower_type_;
  Counts hair_color_;
  Counts accessories_;
};

}  // namespace textswarm
