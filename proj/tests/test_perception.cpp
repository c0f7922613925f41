#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "textswarm/description_template.hpp"
#include "textswarm/errors.hpp"
#include "textswarm/language.hpp"
#include "textswarm/perception.hpp"

using namespace textswarm;

namespace {

PersonAttributes outfit(std::string noun, std::string upper_color, std::string upper, std::string lower_color,
                        std::string lower) {
  PersonAttributes a;
  a.noun = std::move(noun);
  a.upper = {std::move(upper), std::move(upper_color)};
  a.lower = {std::move(lower), std::move(lower_color)};
  a.hair_color = "none";
  return a;
}

std::vector<int> track_ids_over(TrackTable& table, const std::vector<std::vector<int>>& frames,
                                const TrackParams& params, Rng& rng) {
  std::vector<int> ids;
  for (std::size_t t = 0; t < frames.size(); ++t)
    for (const auto& a : table.update(frames[t], static_cast<int>(t) + 1, params, rng)) ids.push_back(a.track_id);
  return ids;
}

}  // namespace

TEST_CASE("a continuously visible person keeps one track") {
  TrackTable table;
  Rng rng(1);
  std::set<int> ids;
  for (int tick = 1; tick <= 10; ++tick)
    for (const auto& a : table.update(std::vector{5}, tick, {5, 0.0}, rng)) ids.insert(a.track_id);
  CHECK(ids.size() == 1);
}

TEST_CASE("a gap longer than max_gap opens a new track") {
  TrackTable table;
  Rng rng(1);
  const auto first = table.update(std::vector{5}, 1, {5, 0.0}, rng);
  for (int tick = 2; tick <= 8; ++tick) table.update(std::vector<int>{}, tick, {5, 0.0}, rng);
  const auto second = table.update(std::vector{5}, 9, {5, 0.0}, rng);
  REQUIRE(first.size() == 1);
  REQUIRE(second.size() == 1);
  CHECK(first[0].track_id != second[0].track_id);
  CHECK(second[0].fresh);
  CHECK_FALSE(table.track(first[0].track_id).active);
}

TEST_CASE("a gap of exactly max_gap keeps the track") {
  TrackTable table;
  Rng rng(1);
  const auto first = table.update(std::vector{5}, 1, {5, 0.0}, rng);
  const auto second = table.update(std::vector{5}, 6, {5, 0.0}, rng);
  CHECK(first[0].track_id == second[0].track_id);
  CHECK_FALSE(second[0].fresh);
}

TEST_CASE("p_track_break = 1 gives a new track at every visible tick") {
  TrackTable table;
  Rng rng(1);
  std::set<int> ids;
  for (int tick = 1; tick <= 10; ++tick)
    for (const auto& a : table.update(std::vector{5}, tick, {5, 1.0}, rng)) {
      CHECK(a.fresh);
      ids.insert(a.track_id);
    }
  CHECK(ids.size() == 10);
  CHECK(std::count_if(table.tracks().begin(), table.tracks().end(), [](const Track& t) { return t.active; }) == 1);
}

TEST_CASE("track table rejects non-increasing ticks and duplicate people") {
  TrackTable table;
  Rng rng(1);
  table.update(std::vector{1}, 3, {}, rng);
  CHECK_THROWS_AS(table.update(std::vector{1}, 3, {}, rng), ContractError);
  CHECK_THROWS_AS(table.update(std::vector{2, 2}, 4, {}, rng), ContractError);
}

TEST_CASE("track ids are unique and closed tracks never reopen") {
  TrackTable table;
  Rng rng(17);
  Rng vis(18);
  std::map<int, int> last_person_of_track;
  for (int tick = 1; tick <= 2000; ++tick) {
    std::vector<int> visible;
    for (int p = 0; p < 8; ++p)
      if (vis.bernoulli(0.6)) visible.push_back(p);
    for (const auto& a : table.update(visible, tick, {3, 0.05}, rng)) {
      const Track& t = table.track(a.track_id);
      REQUIRE(t.active);
      REQUIRE(t.person_id == a.person_id);
    }
  }
  std::set<int> ids;
  for (const auto& t : table.tracks()) ids.insert(t.track_id);
  CHECK(ids.size() == table.tracks().size());
}

TEST_CASE("track assignment does not depend on which ids the people carry") {
  // Relabelling every person leaves the track-id stream unchanged.
  Rng vis(5);
  std::vector<std::vector<int>> frames, relabelled;
  const std::vector<int> perm{4, 0, 3, 1, 2};
  for (int t = 0; t < 500; ++t) {
    std::vector<int> f, g;
    for (int p = 0; p < 5; ++p)
      if (vis.bernoulli(0.5)) {
        f.push_back(p);
        g.push_back(perm[static_cast<std::size_t>(p)] + 100);
      }
    frames.push_back(f);
    relabelled.push_back(g);
  }
  TrackTable a, b;
  Rng ra(9), rb(9);
  CHECK(track_ids_over(a, frames, {4, 0.02}, ra) == track_ids_over(b, relabelled, {4, 0.02}, rb));
}

TEST_CASE("noise-free descriptions render the canonical template") {
  Rng rng(1);
  CHECK(describe(outfit("woman", "red", "shirt", "black", "skirt"), {}, rng) ==
        "a woman wearing a red shirt and black skirt");
  CHECK(describe(outfit("man", "blue", "shirt", "gray", "pants"), {}, rng) ==
        "a man wearing a blue shirt and gray pants");

  PersonAttributes full = outfit("girl", "green", "t-shirt", "blue", "jeans");
  full.accessories = {"hat", "glasses", "bag"};
  full.hair_color = "brown";
  CHECK(describe(full, {}, rng) ==
        "a girl wearing a green t-shirt and blue jeans, with a hat, glasses and a bag, brown hair");

  PersonAttributes dress = outfit("lady", "purple", "dress", "", "none");
  CHECK(describe(dress, {}, rng) == "a lady wearing a purple dress");
}

TEST_CASE("full dropout leaves only the noun") {
  Rng rng(3);
  PersonAttributes a = outfit("boy", "yellow", "hoodie", "black", "shorts");
  a.accessories = {"backpack"};
  a.hair_color = "red";
  CHECK(describe(a, {1.0, 0.0, 0.0}, rng) == "a boy");
}

TEST_CASE("synonyms and color confusions come from the shipped tables") {
  const auto& tables = noise_tables();
  CHECK(tables.version == 1);
  Rng rng(8);
  const PersonAttributes a = outfit("man", "red", "jacket", "blue", "jeans");
  for (int i = 0; i < 200; ++i) {
    const auto slots = parse_description(describe(a, {0.0, 1.0, 1.0}, rng));
    REQUIRE(slots.noun);
    const auto& noun_syn = tables.synonyms.at("man");
    CHECK(std::find(noun_syn.begin(), noun_syn.end(), *slots.noun) != noun_syn.end());
    const auto& red = tables.color_confusion.at("red");
    REQUIRE(slots.upper_color);
    CHECK(std::find(red.begin(), red.end(), *slots.upper_color) != red.end());
  }
}

TEST_CASE("every description tokenizes to a list containing its noun") {
  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    const PersonAttributes a = sample_attributes(rng, 0.5);
    const NoiseParams noise{rng.uniform(), rng.uniform(), rng.uniform()};
    const auto tokens = tokenize(describe(a, noise, rng));
    REQUIRE_FALSE(tokens.empty());
    const auto slots = parse_description(describe(a, noise, rng));
    REQUIRE(slots.noun.has_value());
  }
}

TEST_CASE("describe is a pure function of attributes when noise is zero") {
  Rng a(1), b(999);
  for (int i = 0; i < 100; ++i) {
    const PersonAttributes p = sample_attributes(a, 0.4);
    CHECK(describe(p, {}, a) == describe(p, {}, b));
    CHECK(describe(p, {}, a) == canonical_description(p));
  }
}

TEST_CASE("describe rejects invalid input") {
  Rng rng(1);
  CHECK_THROWS_AS(describe(outfit("man", "red", "shirt", "", "none"), {}, rng), ContractError);
  CHECK_THROWS_AS(describe(outfit("robot", "red", "shirt", "blue", "jeans"), {}, rng), ContractError);
  CHECK_THROWS_AS(describe(outfit("man", "red", "shirt", "blue", "jeans"), {1.5, 0, 0}, rng), ContractError);
}

TEST_CASE("sampled attributes respect the vocabulary rules") {
  Rng rng(4);
  for (int i = 0; i < 5000; ++i) {
    const PersonAttributes a = sample_attributes(rng, 0.3);
    REQUIRE_NOTHROW(validate(a));
    if (a.lower.type == "none") REQUIRE(a.upper.type == "dress");
  }
}

TEST_CASE("distinct outfits stay below the similarity bound") {
  Rng rng(12);
  const auto outfits = sample_distinct_outfits(6, 0.6, rng, 0.3);
  REQUIRE(outfits.size() == 6);
  for (std::size_t i = 0; i < outfits.size(); ++i)
    for (std::size_t j = i + 1; j < outfits.size(); ++j)
      CHECK(cosine(embed(tokenize(canonical_description(outfits[i]))),
                   embed(tokenize(canonical_description(outfits[j])))) <= 0.6);
  Rng impossible(1);
  CHECK_THROWS_AS(sample_distinct_outfits(50, 0.0, impossible, 0.3), ConfigError);
}
