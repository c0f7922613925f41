#include "textswarm/vocabulary.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "textswarm/errors.hpp"
#include "textswarm/language.hpp"
#include "textswarm/noise_tables_data.hpp"

namespace textswarm {

namespace {

template <std::size_t N>
bool in(const std::array<std::string_view, N>& words, std::string_view w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

std::size_t accessory_rank(std::string_view a) {
  return static_cast<std::size_t>(
      std::find(vocab::kAccessories.begin(), vocab::kAccessories.end(), a) -
      vocab::kAccessories.begin());
}

}  // namespace

void validate(const PersonAttributes& a) {
  auto fail = [](const std::string& what) { throw ContractError("invalid attributes: " + what); };
  if (!in(vocab::kNouns, a.noun)) fail("noun '" + a.noun + "'");
  if (!in(vocab::kUpperTypes, a.upper.type)) fail("upper type '" + a.upper.type + "'");
  if (!in(vocab::kPalette, a.upper.color)) fail("upper color '" + a.upper.color + "'");
  if (!in(vocab::kLowerTypes, a.lower.type)) fail("lower type '" + a.lower.type + "'");
  if (a.lower.type == vocab::kNone) {
    if (a.upper.type != "dress") fail("lower garment 'none' requires a dress");
  } else if (!in(vocab::kPalette, a.lower.color)) {
    fail("lower color '" + a.lower.color + "'");
  }
  for (std::size_t i = 0; i < a.accessories.size(); ++i) {
    if (!in(vocab::kAccessories, a.accessories[i])) fail("accessory '" + a.accessories[i] + "'");
    if (i > 0 && accessory_rank(a.accessories[i - 1]) >= accessory_rank(a.accessories[i]))
      fail("accessories must be unique and in vocabulary order");
  }
  if (a.hair_color != vocab::kNone && !in(vocab::kPalette, a.hair_color))
    fail("hair color '" + a.hair_color + "'");
}

void to_json(nlohmann::json& j, const PersonAttributes& a) {
  j = nlohmann::json{{"noun", a.noun},
                     {"upper", {{"type", a.upper.type}, {"color", a.upper.color}}},
                     {"lower", {{"type", a.lower.type}, {"color", a.lower.color}}},
                     {"accessories", a.accessories},
                     {"hair_color", a.hair_color}};
}

void from_json(const nlohmann::json& j, PersonAttributes& a) {
  a.noun = j.at("noun").get<std::string>();
  a.upper.type = j.at("upper").at("type").get<std::string>();
  a.upper.color = j.at("upper").at("color").get<std::string>();
  a.lower.type = j.at("lower").at("type").get<std::string>();
  a.lower.color = j.at("lower").value("color", std::string{});
  a.accessories = j.value("accessories", std::vector<std::string>{});
  a.hair_color = j.value("hair_color", std::string(vocab::kNone));
}

const NoiseTables& noise_tables() {
  static const NoiseTables tables = [] {
    const auto doc = nlohmann::json::parse(detail::kNoiseTablesJson);
    NoiseTables t;
    t.version = doc.at("version").get<int>();
    t.synonyms = doc.at("synonyms").get<std::map<std::string, std::vector<std::string>>>();
    t.color_confusion =
        doc.at("color_confusion").get<std::map<std::string, std::vector<std::string>>>();
    return t;
  }();
  return tables;
}

const std::vector<std::string>& color_lexicon() {
  static const std::vector<std::string> lexicon = [] {
    std::vector<std::string> out(vocab::kPalette.begin(), vocab::kPalette.end());
    std::set<std::string> extra;
    for (const auto& [color, shades] : noise_tables().color_confusion)
      for (const auto& s : shades)
        if (!in(vocab::kPalette, s)) extra.insert(s);
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
  }();
  return lexicon;
}

std::vector<std::string> vocabulary_tokens() {
  std::set<std::string> tokens;
  auto add = [&](std::string_view word) {
    for (auto& t : tokenize(word)) tokens.insert(std::move(t));
  };
  for (auto w : vocab::kNouns) add(w);
  for (auto w : vocab::kUpperTypes) add(w);
  for (auto w : vocab::kLowerTypes)
    if (w != vocab::kNone) add(w);
  for (auto w : vocab::kAccessories) add(w);
  for (const auto& w : color_lexicon()) add(w);
  for (const auto& [word, syns] : noise_tables().synonyms) {
    add(word);
    for (const auto& s : syns) add(s);
  }
  add(vocab::kUpperPlaceholder);
  add(vocab::kLowerPlaceholder);
  add(vocab::kHair);
  return {tokens.begin(), tokens.end()};
}

}  // namespace textswarm
