// boundedctl: operator CLI for the room engine and evaluation harness.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bounded/core/errors.hpp"
#include "bounded/harness/benchmarks.hpp"
#include "bounded/harness/trial.hpp"
#include "bounded/runtime/room.hpp"
#include "bounded/runtime/scenario.hpp"
#include "bounded/runtime/trace.hpp"

#ifdef BOUNDED_WITH_GATEWAY
#include "bounded/gateway/server.hpp"
#endif

#ifndef BOUNDED_DATA_DIR
#define BOUNDED_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace bounded;

namespace {

struct Common {
  std::string config;
  std::string scenario = std::string(BOUNDED_DATA_DIR) + "/scenarios/party_room.jsonl";
  std::string out;
  bool json = false;
};

runtime::AppConfig app_config(const Common& c) {
  auto cfg = c.config.empty() ? runtime::default_app_config(BOUNDED_DATA_DIR) : runtime::load_app_config(c.config);
  runtime::apply_env_overrides(cfg);
  return cfg;
}

void emit(const Common& c, const Json& report, const std::string& table) {
  const std::string text = report.dump(2) + "\n";
  if (!c.out.empty()) {
    std::ofstream f(c.out, std::ios::trunc);
    if (!f) throw Error(Errc::io, "cannot write '" + c.out + "'");
    f << text;
    if (!f) throw Error(Errc::io, "write to '" + c.out + "' failed");
  }
  std::cout << (c.json ? text : table) << std::flush;
}

bool usage_error(Errc code) {
  switch (code) {
    case Errc::parse:
    case Errc::validation:
    case Errc::contract_violation:
    case Errc::empty_intent:
    case Errc::unknown_pool:
    case Errc::unknown_bundle:
    case Errc::unknown_agent:
    case Errc::unknown_room:
    case Errc::ownership:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundedctl: bounded-autonomy room engine and evaluation harness"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config, "config file (room defaults, thresholds, endpoints)");
  app.add_option("--scenario", common.scenario, "scenario JSONL");
  app.add_option("--out", common.out, "write the JSON report here");
  app.add_flag("--json", common.json, "print JSON instead of the table");

  // trial
  auto* trial = app.add_subcommand("trial", "run decay trials and print the Table-1 style summary");
  std::string decay = "both";
  std::string setup = "baseline";
  double alpha = 0.2;
  int n = 20;
  std::uint64_t seed = 1;
  Tick horizon = 600;
  std::string trace_path;
  trial->add_option("--decay", decay, "on | off | both")->check(CLI::IsMember({"on", "off", "both"}));
  trial->add_option("--alpha", alpha, "decay rate")->check(CLI::NonNegativeNumber);
  trial->add_option("--setup", setup, "baseline | s1 | s2 | s3 | s4 | all")
      ->check(CLI::IsMember({"baseline", "s1", "s2", "s3", "s4", "all"}, CLI::ignore_case));
  trial->add_option("--n", n, "trials per condition")->check(CLI::PositiveNumber);
  trial->add_option("--seed", seed, "batch seed");
  trial->add_option("--horizon", horizon, "ticks per trial")->check(CLI::PositiveNumber);
  trial->add_option("--trace", trace_path, "write the trace of the first trial of the first condition");

  // bench-ground
  auto* ground = app.add_subcommand("bench-ground", "grounding probe benchmark");
  std::string probes = std::string(BOUNDED_DATA_DIR) + "/probes/grounding_probes.jsonl";
  std::string catalog_path;
  std::string embedder_backend;
  int max_pglv = 0;
  ground->add_option("--probes", probes, "probe JSONL");
  ground->add_option("--catalog", catalog_path, "bundle catalog JSONL");
  ground->add_option("--embedder", embedder_backend, "fixture | remote")->check(CLI::IsMember({"fixture", "remote"}));
  ground->add_option("--max-pglv", max_pglv, "content filter override")->check(CLI::Range(1, 3));

  // bench-whisper
  auto* whisper = app.add_subcommand("bench-whisper", "whisper benchmark with the cross-whisper check");
  std::string cases = std::string(BOUNDED_DATA_DIR) + "/cases/whisper_cases.jsonl";
  std::string cross = std::string(BOUNDED_DATA_DIR) + "/cases/cross_whisper.jsonl";
  std::string policy_backend;
  whisper->add_option("--cases", cases, "whisper case JSONL");
  whisper->add_option("--cross", cross, "cross-whisper pair JSONL");
  whisper->add_option("--policy", policy_backend, "mock | remote")->check(CLI::IsMember({"mock", "remote"}));

  // replay
  auto* replay = app.add_subcommand("replay", "re-derive final room state from a trace");
  std::string replay_path;
  replay->add_option("--trace", replay_path, "trace JSONL")->required();

  // oracle-depth
  auto* oracle = app.add_subcommand("oracle-depth", "analytic terminal-depth distribution");
  double oracle_alpha = 0.2;
  int depth_cap = 10;
  oracle->add_option("--alpha", oracle_alpha, "decay rate")->check(CLI::NonNegativeNumber);
  oracle->add_option("--depth-cap", depth_cap, "depth cap")->check(CLI::PositiveNumber);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a scenario for a number of rounds and write its trace");
  Tick rounds = 120;
  std::string sim_trace;
  simulate->add_option("--rounds", rounds, "rounds to run")->check(CLI::PositiveNumber);
  simulate->add_option("--trace", sim_trace, "trace JSONL")->required();

#ifdef BOUNDED_WITH_GATEWAY
  auto* serve = app.add_subcommand("serve", "start the WebSocket gateway with rooms from the scenario");
  std::string host;
  int port = 0;
  int tick_ms = 0;
  std::string serve_trace_dir;
  serve->add_option("--host", host, "listen address");
  serve->add_option("--port", port, "listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--tick-ms", tick_ms, "wall-clock milliseconds per logical tick")->check(CLI::PositiveNumber);
  serve->add_option("--trace-dir", serve_trace_dir, "write one trace per room here");
#endif

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (trial->parsed()) {
      auto cfg = app_config(common);
      auto services = runtime::make_services(cfg);
      harness::TrialInputs inputs{runtime::load_scenario(common.scenario, cfg.room), services.catalog,
                                  services.embedder, services.policy};
      std::vector<harness::Setup> setups;
      if (setup == "all") {
        setups.assign(std::begin(harness::kAllSetups), std::end(harness::kAllSetups));
      } else {
        setups.push_back(*harness::parse_setup(setup));
      }
      std::vector<bool> conditions;
      if (decay != "off") conditions.push_back(true);
      if (decay != "on") conditions.push_back(false);

      harness::BatchReport report;
      report.horizon = horizon;
      report.seed = seed;
      for (auto s : setups) {
        for (bool on : conditions) {
          auto tc = harness::make_trial_config(s, on, n, seed);
          tc.alpha = alpha;
          tc.room = cfg.room;
          tc.horizon = horizon;
          if (!trace_path.empty() && report.conditions.empty()) {
            runtime::JsonlTraceSink sink{fs::path(trace_path)};
            harness::run_trial(tc, inputs, harness::trial_seed(seed, 0), &sink);
          }
          report.conditions.push_back(harness::run_trial_batch(tc, inputs));
        }
      }
      emit(common, harness::to_json(report), harness::format_table(report));
    } else if (ground->parsed()) {
      auto cfg = app_config(common);
      if (!catalog_path.empty()) cfg.catalog = catalog_path;
      if (!embedder_backend.empty()) cfg.embedder.backend = embedder_backend;
      auto grounding = cfg.room.grounding;
      if (max_pglv != 0) grounding.max_pglv = max_pglv;
      const auto catalog = load_catalog(cfg.catalog);
      const auto embedder = runtime::make_embedder(cfg.embedder);
      const auto report = harness::run_grounding_benchmark(harness::load_probes(probes), *embedder, catalog, grounding);
      emit(common, harness::to_json(report), harness::format_table(report));
    } else if (whisper->parsed()) {
      auto cfg = app_config(common);
      if (!policy_backend.empty()) cfg.policy.backend = policy_backend;
      auto services = runtime::make_services(cfg);
      const auto scenario = runtime::load_scenario(common.scenario, cfg.room);
      const auto report = harness::run_whisper_benchmark(harness::load_whisper_cases(cases),
                                                         harness::load_cross_pairs(cross), scenario, *services.policy,
                                                         *services.embedder, *services.catalog);
      emit(common, harness::to_json(report), harness::format_table(report));
    } else if (replay->parsed()) {
      const auto r = runtime::replay_trace_file(replay_path);
      Json agents = Json::array();
      std::string table = "# replay of " + replay_path + "\n";
      table += "room " + r.state.room_id + ", clock " + std::to_string(r.state.logical_clock) + ", " +
               std::to_string(r.events) + " events, " + std::to_string(r.decisions) + " decisions, " +
               std::to_string(r.halts) + " halts\n";
      for (const auto& a : r.state.agents) {
        agents.push_back(agent_to_json(a));
        table += a.agent_id + ":";
        for (const auto& [peer, score] : a.relationship) table += " " + peer + "=" + std::to_string(score);
        table += "\n";
      }
      Json report = {{"report", "replay"},         {"room_id", r.state.room_id}, {"logical_clock", r.state.logical_clock},
                     {"records", r.records},       {"events", r.events},         {"decisions", r.decisions},
                     {"halts", r.halts},           {"agents", agents}};
      emit(common, report, table);
    } else if (oracle->parsed()) {
      const auto table = harness::depth_distribution_oracle(oracle_alpha, depth_cap);
      Json dist = Json::object();
      double mean = 0.0;
      for (const auto& [d, p] : table) {
        dist[std::to_string(d)] = p;
        mean += d * p;
      }
      Json report = {{"report", "depth_oracle"}, {"alpha", oracle_alpha}, {"depth_cap", depth_cap},
                     {"distribution", dist},     {"mean", mean}};
      emit(common, report, harness::format_oracle(table, oracle_alpha, depth_cap));
    } else if (simulate->parsed()) {
      auto cfg = app_config(common);
      auto services = runtime::make_services(cfg);
      runtime::JsonlTraceSink sink{fs::path(sim_trace)};
      runtime::Room room(runtime::load_scenario(common.scenario, cfg.room), *services.catalog, *services.embedder,
                         *services.policy, &sink);
      std::size_t events = 0;
      while (room.now() < rounds) events += room.advance_round().size();
      Json report = {{"report", "simulate"}, {"rounds", rounds}, {"events", events}, {"trace", sim_trace}};
      emit(common, report, "simulated " + std::to_string(rounds) + " rounds, " + std::to_string(events) +
                               " events, trace " + sim_trace + "\n");
    }
#ifdef BOUNDED_WITH_GATEWAY
    else if (serve->parsed()) {
      auto cfg = app_config(common);
      if (!host.empty()) cfg.gateway.host = host;
      if (port != 0) cfg.gateway.port = static_cast<unsigned short>(port);
      if (tick_ms != 0) cfg.gateway.tick_ms = tick_ms;
      return gateway::serve(cfg, {common.scenario}, serve_trace_dir);
    }
#endif
  } catch (const Error& e) {
    std::cerr << "boundedctl: " << e.what() << "\n";
    return usage_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "boundedctl: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
