// Acceptance driver: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. With --report DIR it also writes a JSON summary and
// the vocabulary collision report.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "metrics_oracle.hpp"
#include "support.hpp"
#include "textswarm/language.hpp"
#include "textswarm/runner.hpp"

using namespace textswarm;
using namespace textswarm::testing;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  json detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

RankingInput random_ranking(Rng& rng) {
  RankingInput in;
  const std::size_t gallery = 1 + rng.below(100);
  const std::size_t probes = 1 + rng.below(30);
  const std::size_t labels = 1 + rng.below(20);
  const std::size_t levels = 2 + rng.below(10);  // coarse scores force ties
  for (std::size_t i = 0; i < gallery; ++i) {
    in.gallery_labels.push_back(static_cast<int>(rng.below(labels)));
    in.gallery_uids.push_back({static_cast<int>(rng.below(4)), static_cast<int>(i)});
  }
  for (std::size_t p = 0; p < probes; ++p) {
    in.probe_labels.push_back(static_cast<int>(rng.below(labels + 3)));
    auto& row = in.scores.emplace_back();
    for (std::size_t j = 0; j < gallery; ++j)
      row.push_back(static_cast<double>(rng.below(levels)) / static_cast<double>(levels - 1));
  }
  return in;
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  Rng rng(make_stream(20240601, "acceptance.oracle", 0));
  int mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    const auto in = random_ranking(rng);
    const std::size_t k_max = in.gallery_labels.size();
    const auto [cmc, map] = oracle_metrics(in, k_max);
    if (cmc_curve(in, k_max) != cmc || mean_ap(in) != map) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 10.0,
          "200 instances, " + std::to_string(mismatches) + " mismatches, " + fmt(elapsed, 3) + " s",
          {{"instances", 200}, {"mismatches", mismatches}, {"seconds", elapsed}}};
}

PersonAttributes outfit(std::string noun, std::string upper_color, std::string upper, std::string lower_color,
                        std::string lower) {
  PersonAttributes a;
  a.noun = std::move(noun);
  a.upper = {std::move(upper), std::move(upper_color)};
  a.lower = {std::move(lower), std::move(lower_color)};
  return a;
}

Outcome purity_rules() {
  json detail;
  bool ok = true;
  {
    DbBuilder b(0);
    b.cluster("a man wearing a red shirt", {1, 1, 2});
    const double v = cluster_purity(std::vector{b.db}, {1, 2});
    detail["majority_with_undetected"] = v;
    ok &= v == (2.0 / 3.0 + 0.0) / 2.0;
  }
  {
    DbBuilder b(0);
    b.cluster("a man wearing a red shirt", {1, 1, 1, 1, 2});
    b.cluster("a man wearing a blue shirt", {1, 1, 1});
    const double v = cluster_purity(std::vector{b.db}, {1});
    detail["largest_cluster_retained"] = v;
    ok &= v == 4.0 / 5.0;
  }
  {
    DbBuilder b(0);
    b.cluster("a man wearing a red shirt", {1});
    const double v = cluster_purity(std::vector{b.db}, {1, 2, 3, 4});
    detail["undetected_penalty"] = v;
    ok &= v == 0.25;
  }
  {
    std::map<int, PersonAttributes> people{{0, outfit("man", "red", "shirt", "blue", "jeans")},
                                           {1, outfit("man", "red", "shirt", "blue", "jeans")}};
    people[1].accessories = {"hat"};
    DbBuilder b(0);
    for (const char* fragment : {"a man", "a man wearing a red top", "a man wearing a blue top", "a guy wearing jeans"})
      b.cluster(fragment, {0});
    b.cluster(canonical_description(people[1]), {1, 1, 1});
    const auto r = evaluate(std::vector{b.db}, people, 5, *reference_language());
    detail["fragmentation"] = {{"normalized_purity", r.normalized_purity}, {"cmc1", r.cmc_at(1)}};
    ok &= r.normalized_purity == 1.0 && r.cmc_at(1) < 1.0;
  }
  return {ok, "examples " + std::string(ok ? "match" : "differ") + ", fragmented normalized purity " +
                  fmt(detail["fragmentation"]["normalized_purity"]) + " with CMC[1] " +
                  fmt(detail["fragmentation"]["cmc1"]),
          detail};
}

Outcome noise_free_separation() {
  int violations = 0, queries = 0, rank1 = 0;
  double worst_purity = 1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimConfig c;
    c.seed = seed;
    c.noise = {};
    c.people.distinct_outfits = true;
    c.thresholds = {0.8, 0.8};
    c.communication_enabled = true;
    const auto a = run_experiment(c);
    std::set<int> detected_anywhere;
    for (const auto& db : a.databases) {
      std::map<int, int> clusters_of;
      for (const auto& [uid, cluster] : db.clusters()) {
        const double p = purity(cluster);
        worst_purity = std::min(worst_purity, p);
        if (p != 1.0) ++violations;
        ++clusters_of[majority_label(cluster)];
      }
      for (const auto& [person, n] : clusters_of) {
        detected_anywhere.insert(person);
        if (n != 1) ++violations;
        ++queries;
        const auto hits = db.query(canonical_description(a.people.at(person)), 1);
        if (!hits.empty() && majority_label(*db.find(hits[0].uid)) == person) ++rank1;
      }
    }
    // Purity over detected identities only.
    std::set<int> gt(detected_anywhere.begin(), detected_anywhere.end());
    if (!gt.empty() && cluster_purity(a.databases, gt) != 1.0) ++violations;
  }
  const bool ok = violations == 0 && queries > 0 && rank1 == queries;
  return {ok,
          "10 seeds, " + std::to_string(violations) + " separation violations, rank-1 " + std::to_string(rank1) +
              "/" + std::to_string(queries),
          {{"violations", violations}, {"queries", queries}, {"rank1", rank1}, {"worst_purity", worst_purity}}};
}

std::map<std::string, double> mean_metrics(const SweepRow& row) {
  return {{"cmc1", row.summary.at("cmc1").mean},
          {"map", row.summary.at("map").mean},
          {"avg_purity", row.summary.at("avg_purity").mean},
          {"total_clusters", row.summary.at("total_clusters").mean}};
}

Outcome communication_trend() {
  SimConfig base;
  base.noise = {0.1, 0.1, 0.05};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);

  // Time one run so the per-run budget is checked on the slowest setting.
  const auto start = Clock::now();
  run_experiment(base);
  const double one_run = seconds_since(start);

  const auto table = sweep(base, "communication_enabled", {false, true}, seeds);
  const auto without = mean_metrics(table.rows[0]);
  const auto with = mean_metrics(table.rows[1]);
  const bool ok = with.at("cmc1") >= without.at("cmc1") && with.at("map") >= without.at("map") &&
                  with.at("avg_purity") >= without.at("avg_purity") && one_run < 30.0;
  std::string summary = "with/without: CMC[1] " + fmt(with.at("cmc1")) + "/" + fmt(without.at("cmc1")) +
                        ", mAP " + fmt(with.at("map")) + "/" + fmt(without.at("map")) + ", purity " +
                        fmt(with.at("avg_purity")) + "/" + fmt(without.at("avg_purity"));
  return {ok, summary, {{"with", with}, {"without", without}, {"seconds_per_run", one_run}}};
}

Outcome fragmentation_trend() {
  SimConfig base;
  base.noise = {0.1, 0.1, 0.05};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  const auto table = sweep(base, "people.count", {6, 50}, seeds);
  const auto small = mean_metrics(table.rows[0]);
  const auto large = mean_metrics(table.rows[1]);
  const double growth = large.at("total_clusters") / small.at("total_clusters");
  const double people_ratio = 50.0 / 6.0;
  const bool ok = growth > people_ratio && large.at("map") < small.at("map");
  return {ok,
          "clusters x" + fmt(growth, 2) + " for people x" + fmt(people_ratio, 2) + ", mAP " + fmt(small.at("map")) +
              " -> " + fmt(large.at("map")),
          {{"people_6", small}, {"people_50", large}, {"cluster_growth", growth}, {"people_ratio", people_ratio}}};
}

Outcome merge_invariants() {
  Rng rng(make_stream(20240601, "acceptance.exchange", 0));
  int violations = 0;
  for (int sequence = 0; sequence < 1000; ++sequence) {
    const auto pop = Population::random(rng, 2 + rng.below(6), {rng.uniform(0, 0.4), rng.uniform(0, 0.4), 0.1});
    const int n_robots = 2 + static_cast<int>(rng.below(3));
    std::vector<ClusterDatabase> dbs;
    std::vector<int> next_track(static_cast<std::size_t>(n_robots), 0);
    for (int r = 0; r < n_robots; ++r) dbs.emplace_back(r);
    int tick = 0;
    std::set<RecordKey> all_records;
    const double theta = rng.uniform(0.5, 1.0);
    for (int step = 0; step < 6; ++step) {
      const auto r = rng.below(dbs.size());
      pop.observe(dbs[r], rng, 1 + static_cast<int>(rng.below(12)), next_track[r], tick, 0.8);
      for (const auto& db : dbs)
        for (const auto& k : record_keys(db)) all_records.insert(k);

      auto i = rng.below(dbs.size());
      auto j = rng.below(dbs.size() - 1);
      if (j >= i) ++j;
      auto union_keys = record_keys(dbs[i]);
      for (const auto& k : record_keys(dbs[j])) union_keys.insert(k);
      exchange(dbs[i], dbs[j], theta);
      if (record_keys(dbs[i]) != union_keys || record_keys(dbs[j]) != union_keys) ++violations;
      if (!each_record_once(dbs[i]) || !each_record_once(dbs[j])) ++violations;
      const ClusterDatabase a = dbs[i], b = dbs[j];
      exchange(dbs[i], dbs[j], theta);
      if (!dbs[i].same_state(a) || !dbs[j].same_state(b)) ++violations;
    }
    std::set<RecordKey> held;
    for (const auto& db : dbs)
      for (const auto& k : record_keys(db)) held.insert(k);
    if (held != all_records) ++violations;
  }
  return {violations == 0, "1000 random exchange sequences, " + std::to_string(violations) + " violations",
          {{"sequences", 1000}, {"violations", violations}}};
}

Outcome determinism() {
  std::vector<SimConfig> configs(5);
  configs[1].noise = {0.1, 0.1, 0.05};
  configs[2].arena.layout = "venue";
  configs[2].noise = {0.2, 0.2, 0.1};
  configs[3].people.count = 20;
  configs[3].communication_enabled = false;
  configs[4].mode = "vector";
  configs[4].people.distinct_outfits = false;
  int mismatches = 0;
  for (auto& c : configs) {
    c.duration_ticks = 2000;
    for (std::uint64_t seed : {1, 2, 3}) {
      c.seed = seed;
      if (render_artifact(run_experiment(c)) != render_artifact(run_experiment(c))) ++mismatches;
    }
  }
  return {mismatches == 0, "5 configs x 3 seeds, " + std::to_string(mismatches) + " differing artifacts",
          {{"runs", 15}, {"mismatches", mismatches}}};
}

Outcome summarizer_properties() {
  Rng rng(make_stream(20240601, "acceptance.summarize", 0));
  int violations = 0;
  const int trials = 2000;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<PersonAttributes> people;
    const auto n_people = 1 + rng.below(3);
    for (std::size_t i = 0; i < n_people; ++i) people.push_back(sample_attributes(rng, 0.5));
    const NoiseParams noise{rng.uniform(0, 0.6), rng.uniform(0, 0.6), rng.uniform(0, 0.6)};
    std::vector<DescriptionRecord> members;
    const int n = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < n; ++i) {
      const auto& p = people[rng.below(people.size())];
      // Repeated texts make the input a genuine multiset.
      std::string text = (i > 0 && rng.bernoulli(0.2)) ? members[rng.below(members.size())].text
                                                        : describe(p, noise, rng);
      members.push_back(make_record(std::move(text), 0, i, i, SealedPersonId(0)));
    }
    const std::string s = summarize(members);
    auto shuffled = members;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    auto doubled = members;
    doubled.insert(doubled.end(), members.begin(), members.end());
    if (summarize(shuffled) != s) ++violations;
    if (summarize(doubled) != s) ++violations;
  }
  return {violations == 0, std::to_string(trials) + " random multisets, " + std::to_string(violations) + " violations",
          {{"multisets", trials}, {"violations", violations}}};
}

json collision_report() {
  json out = json::array();
  for (std::size_t dim : {256u, 128u, 64u}) {
    json pairs = json::array();
    for (const auto& c : vocabulary_collisions(dim))
      pairs.push_back({{"first", c.first}, {"second", c.second}, {"index", c.index}, {"same_sign", c.same_sign}});
    out.push_back({{"dim", dim}, {"collisions", pairs}});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"textswarm acceptance checks"};
  std::string report_dir;
  std::vector<int> only;
  app.add_option("--report", report_dir, "directory for the JSON summary and collision report");
  app.add_option("--only", only, "run only these criteria (1-8)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"purity rule conformance", purity_rules},
      {"noise-free separation", noise_free_separation},
      {"communication benefit trend", communication_trend},
      {"over-fragmentation trend", fragmentation_trend},
      {"merge protocol invariants", merge_invariants},
      {"determinism", determinism},
      {"summarizer properties", summarizer_properties}};

  json summary = json::array();
  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what(), {}};
    }
    all_pass &= o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << number << " (" << criteria[i].first
              << "): " << o.summary << std::endl;
    summary.push_back({{"criterion", number},
                       {"name", criteria[i].first},
                       {"pass", o.pass},
                       {"summary", o.summary},
                       {"detail", o.detail},
                       {"seconds", seconds_since(start)}});
  }

  if (!report_dir.empty()) {
    std::filesystem::create_directories(report_dir);
    std::ofstream(std::filesystem::path(report_dir) / "acceptance.json") << summary.dump(2) << "\n";
    std::ofstream(std::filesystem::path(report_dir) / "vocabulary_collisions.json")
        << collision_report().dump(2) << "\n";
  }
  return all_pass ? 0 : 1;
}
