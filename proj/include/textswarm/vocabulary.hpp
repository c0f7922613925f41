#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace textswarm {

// Fixed appearance vocabularies of simulated people.
namespace vocab {
inline constexpr std::array<std::string_view, 6> kNouns = {"man", "woman", "person",
                                                           "lady", "boy", "girl"};
inline constexpr std::array<std::string_view, 5> kUpperTypes = {"t-shirt", "shirt", "hoodie",
                                                                "jacket", "dress"};
inline constexpr std::array<std::string_view, 5> kLowerTypes = {"jeans", "pants", "skirt",
                                                                "shorts", "none"};
inline constexpr std::array<std::string_view, 12> kPalette = {
    "black", "white",  "gray",   "red",  "blue",  "green",
    "yellow", "orange", "purple", "pink", "brown", "beige"};
inline constexpr std::array<std::string_view, 4> kAccessories = {"hat", "glasses", "backpack",
                                                                 "bag"};
inline constexpr std::string_view kNone = "none";

// Words standing in for a garment whose type was not stated.
inline constexpr std::string_view kUpperPlaceholder = "top";
inline constexpr std::string_view kLowerPlaceholder = "bottoms";
inline constexpr std::string_view kHair = "hair";
}  // namespace vocab

struct Garment {
  std::string type;
  std::string color;  // empty when type is "none"

  friend bool operator==(const Garment&, const Garment&) = default;
};

// Ground-truth appearance of one simulated person.
struct PersonAttributes {
  std::string noun;
  Garment upper;
  Garment lower;
  std::vector<std::string> accessories;  // canonical vocabulary order, no repeats
  std::string hair_color{vocab::kNone};  // palette color or "none"

  friend bool operator==(const PersonAttributes&, const PersonAttributes&) = default;
};

// Throws ContractError naming the first offending field.
void validate(const PersonAttributes& attributes);

void to_json(nlohmann::json& j, const PersonAttributes& a);
void from_json(const nlohmann::json& j, PersonAttributes& a);

// Synonym and adjacent-color tables shipped in data/noise_tables.json.
struct NoiseTables {
  int version = 0;
  std::map<std::string, std::vector<std::string>> synonyms;
  std::map<std::string, std::vector<std::string>> color_confusion;
};

const NoiseTables& noise_tables();

// Every color word a description may contain (palette plus confusion targets).
const std::vector<std::string>& color_lexicon();

// Every distinct token the description template can emit, sorted.
std::vector<std::string> vocabulary_tokens();

}  // namespace textswarm
