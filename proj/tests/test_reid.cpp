#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "textswarm/errors.hpp"
#include "textswarm/language.hpp"
#include "textswarm/reid.hpp"

using namespace textswarm;
using namespace textswarm::testing;

namespace {

DescriptionRecord rec(std::string text, int robot, int track, int tick, int person = 0) {
  return make_record(std::move(text), robot, tick, track, SealedPersonId(person));
}

double text_cosine(const std::string& a, const std::string& b) {
  return cosine(embed(tokenize(a)), embed(tokenize(b)));
}

const std::string kRed = "a man wearing a red shirt and blue jeans";
const std::string kGreen = "a woman wearing a green dress, with a hat";

}  // namespace

TEST_CASE("assign: the first record founds a cluster") {
  ClusterDatabase db(0);
  const auto r = db.assign(rec(kRed, 0, 1, 1), 0.8);
  CHECK(r.route == AssignResult::Route::kCreated);
  CHECK(r.uid == ClusterUid{0, 0});
  REQUIRE(db.clusters().size() == 1);
  CHECK(db.find(r.uid)->summary_text() == kRed);
  CHECK(db.find(r.uid)->contributors() == std::set<int>{0});
}

TEST_CASE("assign: a record matching a summary joins that cluster") {
  ClusterDatabase db(0);
  db.assign(rec(kRed, 0, 1, 1), 0.8);
  const auto r = db.assign(rec(kRed, 0, 2, 2), 0.8);
  CHECK(r.route == AssignResult::Route::kSimilarity);
  CHECK(r.similarity == doctest::Approx(1.0));
  CHECK(db.clusters().size() == 1);
  CHECK(db.find(r.uid)->size() == 2);
}

TEST_CASE("assign: the threshold is inclusive") {
  const std::string other = "a man wearing a red shirt and black jeans";
  const double sim = text_cosine(kRed, other);
  REQUIRE(sim > 0.0);
  REQUIRE(sim < 1.0);

  ClusterDatabase at(0);
  at.assign(rec(kRed, 0, 1, 1), sim);
  CHECK(at.assign(rec(other, 0, 2, 2), sim).route == AssignResult::Route::kSimilarity);

  ClusterDatabase above(0);
  above.assign(rec(kRed, 0, 1, 1), std::nextafter(sim, 1.0));
  CHECK(above.assign(rec(other, 0, 2, 2), std::nextafter(sim, 1.0)).route == AssignResult::Route::kCreated);
}

TEST_CASE("assign: track consistency overrides similarity") {
  ClusterDatabase db(0);
  const auto first = db.assign(rec(kRed, 0, 7, 1), 0.8);
  const auto second = db.assign(rec(kGreen, 0, 7, 2), 0.8);
  CHECK(second.route == AssignResult::Route::kTrack);
  CHECK(second.uid == first.uid);
  CHECK(db.clusters().size() == 1);
  // A different track with the same text founds its own cluster.
  CHECK(db.assign(rec(kGreen, 0, 8, 3), 0.99).route == AssignResult::Route::kCreated);
}

TEST_CASE("assign: equal similarities go to the lowest uid") {
  ClusterDatabase db(0);
  db.assign(rec(kRed, 0, 1, 1), 0.8);                  // uid 0:0
  db.assign(rec("a boy", 0, 2, 2), 0.8);               // uid 0:1
  db.assign(rec(kRed, 0, 2, 3), 0.8);                  // track 2 -> 0:1
  db.assign(rec(kRed, 0, 2, 4), 0.8);                  // 0:1 now summarizes to kRed too
  REQUIRE(db.find({0, 1})->summary_text() == kRed);
  const auto r = db.assign(rec(kRed, 0, 3, 5), 0.8);
  CHECK(r.uid == ClusterUid{0, 0});
}

TEST_CASE("assign: preconditions") {
  ClusterDatabase db(0);
  CHECK_THROWS_AS(db.assign(rec("the a with", 0, 1, 1), 0.8), EmptyDescription);
  CHECK_THROWS_AS(db.assign(rec(kRed, 0, 1, 1), 1.5), ContractError);
  db.assign(rec(kRed, 0, 1, 1), 0.8);
  CHECK_THROWS_AS(db.assign(rec(kRed, 0, 1, 1), 0.8), ContractError);
}

TEST_CASE("cluster count never exceeds the number of distinct tracks") {
  Rng rng(4);
  const auto pop = Population::random(rng, 6, {0.3, 0.3, 0.2});
  for (int trial = 0; trial < 30; ++trial) {
    ClusterDatabase db(0);
    int track = 0, tick = 0;
    pop.observe(db, rng, 200, track, tick, rng.uniform());
    std::set<TrackKey> tracks;
    for (const auto& [uid, c] : db.clusters())
      for (const auto& m : c.members()) tracks.insert(m.track());
    REQUIRE(db.clusters().size() <= tracks.size());
    REQUIRE(summaries_fresh(db));
    REQUIRE(each_record_once(db));
  }
}

TEST_CASE("exchange: an empty side receives verbatim copies") {
  ClusterDatabase a(0), b(1);
  b.assign(rec(kRed, 1, 1, 1), 0.8);
  b.assign(rec(kGreen, 1, 2, 2), 0.8);
  const ClusterDatabase b_before = b;
  const auto result = exchange(a, b, 0.8);
  CHECK(result.into_a.copied.size() == 2);
  CHECK(a.clusters().size() == 2);
  CHECK(a.find({1, 0}) != nullptr);
  CHECK(a.find({1, 1}) != nullptr);
  CHECK(a.find({1, 0})->summary_text() == kRed);
  CHECK(b.same_state(b_before));
}

TEST_CASE("exchange: identical cluster sets are a fixed point") {
  ClusterDatabase a(0), b(1);
  a.assign(rec(kRed, 0, 1, 1), 0.8);
  a.assign(rec(kGreen, 0, 2, 2), 0.8);
  exchange(a, b, 0.8);
  const ClusterDatabase a1 = a, b1 = b;
  const auto again = exchange(a, b, 0.8);
  CHECK(again.into_a.records_added == 0);
  CHECK(again.into_b.records_added == 0);
  CHECK(a.same_state(a1));
  CHECK(b.same_state(b1));
}

TEST_CASE("exchange: noise-free observations of one outfit merge into the union") {
  ClusterDatabase a(0), b(1);
  a.assign(rec(kRed, 0, 1, 10), 0.8);
  a.assign(rec(kRed, 0, 1, 20), 0.8);
  b.assign(rec(kRed, 1, 4, 15), 0.8);
  REQUIRE(text_cosine(a.clusters().begin()->second.summary_text(), b.clusters().begin()->second.summary_text()) ==
          doctest::Approx(1.0));
  const auto expected = [&] {
    auto m = member_multiset(a);
    auto mb = member_multiset(b);
    m.insert(mb.begin(), mb.end());
    return m;
  }();
  exchange(a, b, 0.8);
  CHECK(a.clusters().size() == 1);
  CHECK(b.clusters().size() == 1);
  CHECK(member_multiset(a) == expected);
  CHECK(member_multiset(b) == expected);
  // Each side keeps its own uid and remembers where the peer's cluster went.
  CHECK(a.clusters().begin()->first == ClusterUid{0, 0});
  CHECK(b.clusters().begin()->first == ClusterUid{1, 0});
  CHECK(a.tombstones().at({1, 0}) == ClusterUid{0, 0});
}

TEST_CASE("exchange: a cluster merged away keeps receiving its own updates") {
  ClusterDatabase a(0), b(1);
  a.assign(rec(kRed, 0, 1, 1), 0.8);
  b.assign(rec(kRed, 1, 1, 2), 0.8);
  exchange(a, b, 0.8);
  // b's cluster drifts in summary but a routes it by tombstone, not by similarity.
  b.assign(rec(kGreen, 1, 1, 3), 0.8);
  b.assign(rec(kGreen, 1, 1, 4), 0.8);
  b.assign(rec(kGreen, 1, 1, 5), 0.8);
  exchange(a, b, 0.99);
  CHECK(a.clusters().size() == 1);
  CHECK(a.find({0, 0})->size() == 5);
}

TEST_CASE("exchange: preconditions") {
  ClusterDatabase a(0), same(0), vec(1, MatchMode::kVector);
  CHECK_THROWS_AS(exchange(a, same, 0.8), ContractError);
  CHECK_THROWS_AS(exchange(a, vec, 0.8), ContractError);
  ClusterDatabase b(1);
  CHECK_THROWS_AS(exchange(a, b, -0.1), ContractError);
}

TEST_CASE("exchange conserves members on random databases") {
  Rng rng(2718);
  for (int trial = 0; trial < 60; ++trial) {
    const auto pop = Population::random(rng, 5, {0.2, 0.2, 0.1});
    ClusterDatabase a(0), b(1);
    int ta = 0, tb = 0, tick = 0;
    pop.observe(a, rng, 40, ta, tick, 0.8);
    pop.observe(b, rng, 40, tb, tick, 0.8);
    auto expected = member_multiset(a);
    for (const auto& m : member_multiset(b)) expected.insert(m);
    const double theta = rng.uniform(0.5, 1.0);
    exchange(a, b, theta);
    REQUIRE(member_multiset(a) == expected);
    REQUIRE(member_multiset(b) == expected);
    REQUIRE(each_record_once(a));
    REQUIRE(summaries_fresh(a));
    const ClusterDatabase a1 = a, b1 = b;
    exchange(a, b, theta);
    REQUIRE(a.same_state(a1));
    REQUIRE(b.same_state(b1));
  }
}

TEST_CASE("tombstones are bounded by the cap, oldest first") {
  ClusterDatabase a(0, MatchMode::kText, nullptr, 2);
  a.assign(rec(kRed, 0, 1, 1), 0.8);
  for (int peer = 1; peer <= 3; ++peer) {
    ClusterDatabase p(peer);
    p.assign(rec(kRed, peer, 1, 10 + peer), 0.8);
    a.absorb(p, 0.8);
  }
  CHECK(a.tombstones().size() == 2);
  CHECK_FALSE(a.tombstones().contains({1, 0}));
  CHECK(a.tombstones().contains({3, 0}));
}

TEST_CASE("query ranks clusters by similarity and returns recent samples") {
  ClusterDatabase db(0);
  CHECK(db.query("a man", 3).empty());
  db.assign(rec(kRed, 0, 1, 1), 0.8);
  db.assign(rec(kRed, 0, 1, 5), 0.8);
  db.assign(rec(kRed, 0, 1, 9), 0.8);
  db.assign(rec(kRed, 0, 1, 13), 0.8);
  db.assign(rec(kGreen, 0, 2, 2), 0.8);
  const auto hits = db.query(kGreen, 5);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].summary == kGreen);
  CHECK(hits[0].score == doctest::Approx(1.0));
  CHECK(hits[0].score >= hits[1].score);
  const auto red = db.query(kRed, 1);
  REQUIRE(red.size() == 1);
  REQUIRE(red[0].samples.size() == 3);
  CHECK(red[0].samples[0].tick == 13);
  CHECK(red[0].samples[2].tick == 5);
  CHECK_THROWS_AS(db.query("with the", 1), EmptyDescription);
  CHECK_THROWS_AS(db.query(kRed, 0), ContractError);
}

TEST_CASE("query finds the lady in the green t-shirt") {
  ClusterDatabase db(0);
  db.assign(rec("a lady wearing a green t-shirt and black skirt", 0, 1, 1), 0.8);
  db.assign(rec("a man wearing a red hoodie and blue jeans", 0, 2, 2), 0.8);
  db.assign(rec("a boy wearing a green jacket and gray shorts", 0, 3, 3), 0.8);
  const auto hits = db.query("a lady with a green t-shirt", 1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].uid == ClusterUid{0, 0});
}

TEST_CASE("vector mode matches on the member centroid") {
  ClusterDatabase db(0, MatchMode::kVector);
  db.assign(rec(kRed, 0, 1, 1), 0.8);
  const Cluster& c = db.clusters().begin()->second;
  CHECK(&db.match_embedding(c) == &c.centroid());
  CHECK(db.assign(rec(kRed, 0, 2, 2), 0.8).route == AssignResult::Route::kSimilarity);
  CHECK(parse_match_mode("vector") == MatchMode::kVector);
  CHECK(to_string(MatchMode::kText) == "text");
  CHECK_THROWS_AS(parse_match_mode("images"), ContractError);
}

TEST_CASE("snapshots round-trip through JSON") {
  Rng rng(5);
  const auto pop = Population::random(rng, 4, {0.2, 0.2, 0.1});
  ClusterDatabase a(0), b(1);
  int ta = 0, tb = 0, tick = 0;
  pop.observe(a, rng, 30, ta, tick, 0.8);
  pop.observe(b, rng, 30, tb, tick, 0.8);
  exchange(a, b, 0.8);
  const auto doc = a.to_json();
  const auto back = ClusterDatabase::from_json(doc);
  CHECK(back.same_state(a));
  CHECK(back.to_json() == doc);
  CHECK(member_multiset(back) == member_multiset(a));

  auto broken = doc;
  broken["version"] = 99;
  CHECK_THROWS_AS(ClusterDatabase::from_json(broken), ContractError);
}
