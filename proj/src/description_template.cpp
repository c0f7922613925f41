#include "textswarm/description_template.hpp"

#include <algorithm>
#include <unordered_map>

#include "textswarm/errors.hpp"
#include "textswarm/vocabulary.hpp"

namespace textswarm {

namespace {

enum class WordClass { kNoun, kUpper, kUpperPlaceholder, kLower, kLowerPlaceholder, kColor, kAccessory, kHair };

const std::unordered_map<std::string, WordClass>& lexicon() {
  static const auto table = [] {
    std::unordered_map<std::string, WordClass> t;
    auto put = [&](std::string_view word, WordClass c) {
      auto [it, inserted] = t.emplace(std::string(word), c);
      if (!inserted && it->second != c)
        throw ContractError("word '" + std::string(word) + "' belongs to two word classes");
    };
    const auto& synonyms = noise_tables().synonyms;
    auto put_with_synonyms = [&](std::string_view word, WordClass c) {
      put(word, c);
      if (auto it = synonyms.find(std::string(word)); it != synonyms.end())
        for (const auto& s : it->second) put(s, c);
    };
    for (auto w : vocab::kNouns) put_with_synonyms(w, WordClass::kNoun);
    for (auto w : vocab::kUpperTypes) put_with_synonyms(w, WordClass::kUpper);
    for (auto w : vocab::kLowerTypes)
      if (w != vocab::kNone) put_with_synonyms(w, WordClass::kLower);
    put(vocab::kUpperPlaceholder, WordClass::kUpperPlaceholder);
    put(vocab::kLowerPlaceholder, WordClass::kLowerPlaceholder);
    for (const auto& c : color_lexicon()) put(c, WordClass::kColor);
    for (auto w : vocab::kAccessories) put(w, WordClass::kAccessory);
    put(vocab::kHair, WordClass::kHair);
    return t;
  }();
  return table;
}

std::size_t accessory_rank(std::string_view a) {
  auto it = std::find(vocab::kAccessories.begin(), vocab::kAccessories.end(), a);
  return static_cast<std::size_t>(it - vocab::kAccessories.begin());
}

void sort_accessories(std::vector<std::string>& accessories) {
  std::sort(accessories.begin(), accessories.end(), [](const auto& a, const auto& b) {
    const auto ra = accessory_rank(a), rb = accessory_rank(b);
    return ra != rb ? ra < rb : a < b;
  });
}

std::string_view article(std::string_view accessory) {
  return accessory == "glasses" ? "" : "a ";
}

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (alnum || c == '-') {
      cur.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

}  // namespace

std::string render_description(const DescriptionSlots& s) {
  std::string out = "a " + s.noun.value_or("person");
  const bool upper = s.upper_color || s.upper_type;
  const bool lower = s.lower_color || s.lower_type;
  if (upper || lower) out += " wearing ";
  if (upper) {
    out += "a ";
    if (s.upper_color) out += *s.upper_color + " ";
    out += s.upper_type.value_or(std::string(vocab::kUpperPlaceholder));
  }
  if (upper && lower) out += " and ";
  if (lower) {
    if (s.lower_color) out += *s.lower_color + " ";
    out += s.lower_type.value_or(std::string(vocab::kLowerPlaceholder));
  }
  if (!s.accessories.empty()) {
    out += ", with ";
    for (std::size_t i = 0; i < s.accessories.size(); ++i) {
      if (i > 0) out += (i + 1 == s.accessories.size()) ? " and " : ", ";
      out += article(s.accessories[i]);
      out += s.accessories[i];
    }
  }
  if (s.hair_color) out += ", " + *s.hair_color + " hair";
  return out;
}

DescriptionSlots parse_description(std::string_view text) {
  const auto& lex = lexicon();
  DescriptionSlots s;
  std::optional<std::string> pending_color;
  bool upper_seen = false;
  bool lower_seen = false;
  for (auto& w : words_of(text)) {
    const auto it = lex.find(w);
    if (it == lex.end()) continue;
    switch (it->second) {
      case WordClass::kNoun:
        if (!s.noun) s.noun = w;
        pending_color.reset();
        break;
      case WordClass::kColor:
        pending_color = w;
        break;
      case WordClass::kUpper:
      case WordClass::kUpperPlaceholder:
        if (!upper_seen) {
          upper_seen = true;
          s.upper_color = pending_color;
          if (it->second == WordClass::kUpper) s.upper_type = w;
        }
        pending_color.reset();
        break;
      case WordClass::kLower:
      case WordClass::kLowerPlaceholder:
        if (!lower_seen) {
          lower_seen = true;
          s.lower_color = pending_color;
          if (it->second == WordClass::kLower) s.lower_type = w;
        }
        pending_color.reset();
        break;
      case WordClass::kHair:
        if (!s.hair_color && pending_color) s.hair_color = pending_color;
        pending_color.reset();
        break;
      case WordClass::kAccessory:
        if (std::find(s.accessories.begin(), s.accessories.end(), w) == s.accessories.end())
          s.accessories.push_back(w);
        pending_color.reset();
        break;
    }
  }
  sort_accessories(s.accessories);
  return s;
}

void SlotTally::add(const DescriptionSlots& s) {
  ++members_;
  auto bump = [](Counts& c, const std::optional<std::string>& v) {
    if (v) ++c[*v];
  };
  bump(noun_, s.noun);
  bump(upper_color_, s.upper_color);
  bump(upper_type_, s.upper_type);
  bump(lower_color_, s.lower_color);
  bump(lower_type_, s.lower_type);
  bump(hair_color_, s.hair_color);
  for (const auto& a : s.accessories) ++accessories_[a];
}

void SlotTally::merge(const SlotTally& other) {
  members_ += other.members_;
  auto fold = [](Counts& into, const Counts& from) {
    for (const auto& [v, n] : from) into[v] += n;
  };
  fold(noun_, other.noun_);
  fold(upper_color_, other.upper_color_);
  fold(upper_type_, other.upper_type_);
  fold(lower_color_, other.lower_color_);
  fold(lower_type_, other.lower_type_);
  fold(hair_color_, other.hair_color_);
  fold(accessories_, other.accessories_);
}

DescriptionSlots SlotTally::consensus() const {
  // mentions >= ceil(members / 4)  <=>  4 * mentions >= members
  auto enough = [&](int mentions) { return mentions > 0 && 4 * mentions >= members_; };
  auto pick = [&](const Counts& c) -> std::optional<std::string> {
    int mentions = 0;
    const std::string* best = nullptr;
    int best_count = 0;
    for (const auto& [value, n] : c) {  // ascending, so strict > keeps the smallest on ties
      mentions += n;
      if (n > best_count) {
        best = &value;
        best_count = n;
      }
    }
    if (!enough(mentions)) return std::nullopt;
    return *best;
  };
  DescriptionSlots s;
  s.noun = pick(noun_);
  s.upper_color = pick(upper_color_);
  s.upper_type = pick(upper_type_);
  s.lower_color = pick(lower_color_);
  s.lower_type = pick(lower_type_);
  s.hair_color = pick(hair_color_);
  for (const auto& [a, n] : accessories_)
    if (enough(n)) s.accessories.push_back(a);
  sort_accessories(s.accessories);
  return s;
}

}  // namespace textswarm
