// textswarm: run, sweep, query and report on multi-robot text re-identification experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "textswarm/config.hpp"
#include "textswarm/errors.hpp"
#include "textswarm/language.hpp"
#include "textswarm/runner.hpp"

namespace ts = textswarm;

namespace {

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", path, "JSON configuration file (nested or dotted keys)");
    app->add_option("--set", overrides, "Override one key, e.g. --set noise.p_drop=0.1")->take_all();
  }

  ts::SimConfig resolve() const {
    ts::SimConfig c = path.empty() ? ts::SimConfig{} : ts::load_config(path);
    for (const auto& o : overrides) c.apply_override(o);
    c.validate();
    return c;
  }
};

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ',');) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(part));
      } else {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw std::invalid_argument(part);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw ts::ConfigError({"--seeds"}, "cannot parse seed list '" + spec + "'");
    }
  }
  if (seeds.empty()) throw ts::ConfigError({"--seeds"}, "seed list is empty");
  return seeds;
}

nlohmann::json parse_value(const std::string& raw) {
  auto v = nlohmann::json::parse(raw, nullptr, false);
  return v.is_discarded() ? nlohmann::json(raw) : v;
}

void print_metrics(const ts::MetricsReport& m) {
  std::printf("CMC@1              %.4f\n", m.cmc_at(1));
  std::printf("CMC@5              %.4f\n", m.cmc_at(5));
  std::printf("mAP                %.4f\n", m.map_score);
  std::printf("avg purity         %.4f\n", m.avg_purity);
  std::printf("normalized purity  %.4f\n", m.normalized_purity);
  std::printf("clusters           %d (", m.total_clusters());
  for (std::size_t i = 0; i < m.clusters_per_robot.size(); ++i)
    std::printf("%s%d", i ? " " : "", m.clusters_per_robot[i]);
  std::printf(" per robot)\n");
  std::printf("detected people    %d of %d\n", m.detected_identity_count, m.ground_truth_count);
  std::printf("gallery size       %d\n", m.gallery_size);
  std::printf("config fingerprint %s\n", m.config_fingerprint.c_str());
}

bool same_metrics(const ts::MetricsReport& a, const ts::MetricsReport& b) {
  return nlohmann::json(a) == nlohmann::json(b);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-based person re-identification for robot swarms"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one simulation and write its artifact directory");
  ConfigArgs run_cfg;
  run_cfg.attach(run);
  std::string run_out = "textswarm-run";
  std::uint64_t run_seed = 0;
  run->add_option("-o,--out", run_out, "Artifact directory")->capture_default_str();
  run->add_option("--seed", run_seed, "Shorthand for --set seed=N");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Sweep one configuration key across values and seeds");
  ConfigArgs sw_cfg;
  sw_cfg.attach(sw);
  std::string sw_axis, sw_seeds = "1-10", sw_out;
  std::vector<std::string> sw_values;
  int sw_jobs = 0;
  sw->add_option("--axis", sw_axis, "Configuration key to vary")->required();
  sw->add_option("--values", sw_values, "Comma-separated values (JSON literals or strings)")
      ->required()
      ->delimiter(',');
  sw->add_option("--seeds", sw_seeds, "Seed list such as 1-10 or 3,5,8")->capture_default_str();
  sw->add_option("-j,--jobs", sw_jobs, "Parallel runs (0 = all cores)");
  sw->add_option("-o,--out", sw_out, "Write the CSV table here instead of stdout");

  // query
  auto* q = app.add_subcommand("query", "Rank a robot's clusters against a free-text description");
  std::string q_dir, q_text;
  int q_robot = -1;
  std::size_t q_k = 5;
  q->add_option("-a,--artifact", q_dir, "Artifact directory written by 'run'")->required();
  q->add_option("-t,--text", q_text, "Query description")->required();
  q->add_option("-r,--robot", q_robot, "Robot id (default: every robot)");
  q->add_option("-k", q_k, "Number of hits per robot")->capture_default_str();

  // report
  auto* rep = app.add_subcommand("report", "Print the metrics of an artifact directory");
  std::string rep_dir;
  bool rep_check = false, rep_json = false;
  rep->add_option("-a,--artifact", rep_dir, "Artifact directory written by 'run'")->required();
  rep->add_flag("--check", rep_check, "Recompute metrics from the snapshots and fail on mismatch");
  rep->add_flag("--json", rep_json, "Print the stored metrics as JSON");

  // vocab-report
  auto* voc = app.add_subcommand("vocab-report", "List vocabulary tokens that share an embedding bucket");
  std::size_t voc_dim = ts::kDefaultEmbeddingDim;
  voc->add_option("--dim", voc_dim, "Embedding dimension")->capture_default_str();

  // config
  auto* cfg = app.add_subcommand("config", "Print the resolved configuration as flat JSON");
  ConfigArgs cfg_args;
  cfg_args.attach(cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ts::SimConfig c = run_cfg.resolve();
      if (run->count("--seed")) c.seed = run_seed;
      const auto artifact = ts::run_experiment(c);
      ts::write_artifact(artifact, run_out);
      print_metrics(artifact.metrics);
      std::printf("artifact           %s\n", run_out.c_str());
    } else if (*sw) {
      std::vector<nlohmann::json> values;
      for (const auto& v : sw_values) values.push_back(parse_value(v));
      const auto table = ts::sweep(sw_cfg.resolve(), sw_axis, values, parse_seeds(sw_seeds), sw_jobs);
      const std::string csv = ts::sweep_csv(table);
      if (sw_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(sw_out) << csv;
        std::printf("wrote %s\n", sw_out.c_str());
      }
    } else if (*q) {
      const auto artifact = ts::read_artifact(q_dir);
      std::cout << ts::render_query_table(ts::query_databases(artifact.databases, q_robot, q_text, q_k));
    } else if (*rep) {
      const auto artifact = ts::read_artifact(rep_dir);
      if (rep_json)
        std::cout << nlohmann::json(artifact.metrics).dump(2) << "\n";
      else
        print_metrics(artifact.metrics);
      if (rep_check) {
        const bool ok = same_metrics(artifact.metrics, ts::recompute_metrics(artifact));
        std::printf("recomputed metrics %s\n", ok ? "match" : "DIFFER");
        if (!ok) return 4;
      }
    } else if (*voc) {
      const auto collisions = ts::vocabulary_collisions(voc_dim);
      std::printf("dim %zu: %zu colliding vocabulary pairs\n", voc_dim, collisions.size());
      for (const auto& c : collisions)
        std::printf("  bucket %4zu  %-12s %-12s %s\n", c.index, c.first.c_str(), c.second.c_str(),
                    c.same_sign ? "same sign" : "opposite sign");
    } else if (*cfg) {
      std::cout << cfg_args.resolve().to_flat_json().dump(2) << "\n";
    }
  } catch (const ts::EmptyDescription& e) {
    std::fprintf(stderr, "error: %s\nhint: describe the person with at least one content word, "
                         "e.g. -t \"a woman wearing a red shirt\"\n", e.what());
    return 2;
  } catch (const ts::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ts::ContractError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
