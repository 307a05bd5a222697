#include "bounded/harness/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>

#include <fmt/format.h>

#include "bounded/core/errors.hpp"
#include "bounded/runtime/room.hpp"
#include "bounded/whisper/whisper.hpp"

namespace bounded::harness {

namespace {

template <typename T, typename F>
std::vector<T> parse_jsonl(std::istream& in, F&& row) {
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(row(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw Error(Errc::parse, e.what(), line_no);
    } catch (const Error& e) {
      if (e.line()) throw;
      throw Error(e.code(), e.what(), line_no);
    }
  }
  return out;
}

template <typename T, typename F>
std::vector<T> load_jsonl(const std::filesystem::path& path, F&& row) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  return parse_jsonl<T>(in, std::forward<F>(row));
}

std::optional<std::string> opt_string(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

bool one_of(const std::string& s, const auto& options) {
  return std::find(std::begin(options), std::end(options), s) != std::end(options);
}

ProbeCase probe_from_json(const Json& j) {
  ProbeCase p;
  p.intent = j.at("intent").get<std::string>();
  const auto pool = j.at("pool").get<std::string>();
  auto kind = parse_pool(pool);
  if (!kind) throw Error(Errc::unknown_pool, "unknown pool '" + pool + "'");
  p.pool = *kind;
  p.expected = opt_string(j, "expected");
  p.difficulty = j.at("difficulty").get<std::string>();
  if (!one_of(p.difficulty, kDifficulties)) throw Error(Errc::validation, "unknown difficulty '" + p.difficulty + "'");
  return p;
}

WhisperCase case_from_json(const Json& j) {
  WhisperCase c;
  c.id = j.at("id").get<std::string>();
  c.text = j.at("text").get<std::string>();
  const auto cond = j.at("condition").get<std::string>();
  if (cond == "to_other") {
    c.condition = WhisperCondition::to_other;
  } else if (cond == "to_self") {
    c.condition = WhisperCondition::to_self;
  } else {
    throw Error(Errc::validation, "unknown whisper condition '" + cond + "'");
  }
  c.agent = j.at("agent").get<std::string>();
  c.target = opt_string(j, "target");
  if (c.condition == WhisperCondition::to_other && !c.target) {
    throw Error(Errc::validation, "to_other case '" + c.id + "' needs a target");
  }
  c.expected = opt_string(j, "expected");
  c.annotation = j.at("annotation").get<std::string>();
  static constexpr const char* kLabels[] = {"success", "partial", "failure"};
  if (!one_of(c.annotation, kLabels)) throw Error(Errc::validation, "unknown annotation '" + c.annotation + "'");
  c.failure_mode = opt_string(j, "failure_mode");
  if (c.failure_mode && !one_of(*c.failure_mode, kFailureModes)) {
    throw Error(Errc::validation, "unknown failure mode '" + *c.failure_mode + "'");
  }
  return c;
}

CrossWhisperPair pair_from_json(const Json& j) {
  return {j.at("id").get<std::string>(), j.at("agent").get<std::string>(), j.at("target").get<std::string>(),
          j.at("whisper").get<std::string>(), j.at("opposing").get<std::string>()};
}

Json match_json(const ground::GroundingMatch& m) {
  Json top = Json::array();
  for (const auto& c : m.top) top.push_back({{"id", c.id}, {"similarity", c.similarity}});
  return {{"bundle", m.bundle.id}, {"similarity", m.similarity}, {"fell_back", m.fell_back}, {"top", top}};
}

double pct(int k, int n) { return n == 0 ? 0.0 : 100.0 * k / n; }

}  // namespace

std::vector<ProbeCase> parse_probes(std::istream& in) { return parse_jsonl<ProbeCase>(in, probe_from_json); }
std::vector<ProbeCase> load_probes(const std::filesystem::path& path) {
  return load_jsonl<ProbeCase>(path, probe_from_json);
}
std::vector<WhisperCase> parse_whisper_cases(std::istream& in) { return parse_jsonl<WhisperCase>(in, case_from_json); }
std::vector<WhisperCase> load_whisper_cases(const std::filesystem::path& path) {
  return load_jsonl<WhisperCase>(path, case_from_json);
}
std::vector<CrossWhisperPair> parse_cross_pairs(std::istream& in) {
  return parse_jsonl<CrossWhisperPair>(in, pair_from_json);
}
std::vector<CrossWhisperPair> load_cross_pairs(const std::filesystem::path& path) {
  return load_jsonl<CrossWhisperPair>(path, pair_from_json);
}

std::vector<PoolAccuracy> pool_sizes(const BundleCatalog& catalog, const ground::GroundingConfig& config) {
  std::vector<PoolAccuracy> out;
  for (PoolKind p : {PoolKind::talk, PoolKind::non_talk, PoolKind::to_self}) {
    PoolAccuracy a;
    a.pool = p;
    a.pool_size = catalog.count(p);
    a.candidates = ground::filter_candidates(catalog.pool(p), Emotion::neutral, config).size();
    out.push_back(a);
  }
  return out;
}

GroundingReport run_grounding_benchmark(const std::vector<ProbeCase>& probes, const ground::Embedder& embedder,
                                        const BundleCatalog& catalog, const ground::GroundingConfig& config) {
  config.validate();
  GroundingReport r;
  r.model_id = embedder.model_id();
  r.max_pglv = config.max_pglv;
  r.threshold = config.fallback_threshold;
  r.pools = pool_sizes(catalog, config);
  std::array<double, 3> sim_sum{};

  for (const auto& probe : probes) {
    if (probe.expected) {
      const auto* b = catalog.find(*probe.expected);
      if (b == nullptr || b->pool != probe.pool) {
        throw Error(Errc::unknown_bundle, "probe expects '" + *probe.expected + "', not in pool " +
                                              std::string(to_string(probe.pool)));
      }
    }
    ProbeResult res;
    res.probe = probe;
    res.match = ground::ground_in_pool(probe.intent, probe.pool, catalog, Emotion::neutral, embedder, config);
    const auto candidates = ground::filter_candidates(catalog.pool(probe.pool), Emotion::neutral, config);
    const auto top3 = ground::retrieve(probe.intent, candidates, embedder, 3);
    if (probe.expected) {
      res.top1 = res.match.bundle.id == *probe.expected;
      res.top3 = std::any_of(top3.begin(), top3.end(),
                             [&](const ground::GroundingMatch& m) { return m.bundle.id == *probe.expected; });
    } else {
      res.top1 = res.top3 = res.match.fell_back;
    }
    auto& pool = r.pools[static_cast<std::size_t>(probe.pool)];
    ++pool.n;
    pool.top1 += res.top1;
    pool.top3 += res.top3;
    sim_sum[static_cast<std::size_t>(probe.pool)] += top3.front().similarity;
    ++r.n;
    r.top1 += res.top1;
    r.top3 += res.top3;
    r.results.push_back(std::move(res));
  }
  for (std::size_t i = 0; i < r.pools.size(); ++i) {
    if (r.pools[i].n > 0) r.pools[i].mean_top1_similarity = sim_sum[i] / r.pools[i].n;
  }
  return r;
}

Json to_json(const GroundingReport& r) {
  Json pools = Json::array();
  for (const auto& p : r.pools) {
    pools.push_back({{"pool", to_string(p.pool)},
                     {"n", p.n},
                     {"top1", p.top1},
                     {"top3", p.top3},
                     {"top1_accuracy", p.n ? static_cast<double>(p.top1) / p.n : 0.0},
                     {"top3_accuracy", p.n ? static_cast<double>(p.top3) / p.n : 0.0},
                     {"mean_top1_similarity", p.mean_top1_similarity},
                     {"pool_size", p.pool_size},
                     {"candidates", p.candidates}});
  }
  Json cases = Json::array();
  for (const auto& c : r.results) {
    cases.push_back({{"intent", c.probe.intent},
                     {"pool", to_string(c.probe.pool)},
                     {"difficulty", c.probe.difficulty},
                     {"expected", c.probe.expected ? Json(*c.probe.expected) : Json(nullptr)},
                     {"match", match_json(c.match)},
                     {"top1", c.top1},
                     {"top3", c.top3}});
  }
  return {{"report", "grounding_benchmark"},
          {"model_id", r.model_id},
          {"max_pglv", r.max_pglv},
          {"threshold", r.threshold},
          {"n", r.n},
          {"top1", r.top1},
          {"top3", r.top3},
          {"pools", std::move(pools)},
          {"cases", std::move(cases)}};
}

std::string format_table(const GroundingReport& r) {
  std::string out = fmt::format("# grounding probes, model {}, max_pglv {}, threshold {}\n", r.model_id, r.max_pglv,
                                r.threshold);
  out += fmt::format("{:<9} {:>4}  {:>7}  {:>7}  {:>9}  {:>16}\n", "pool", "n", "top-1", "top-3", "mean sim",
                     "candidates/pool");
  for (const auto& p : r.pools) {
    out += fmt::format("{:<9} {:>4}  {:>6.1f}%  {:>6.1f}%  {:>9.3f}  {:>7}/{:<8}\n", to_string(p.pool), p.n,
                       pct(p.top1, p.n), pct(p.top3, p.n), p.mean_top1_similarity, p.candidates, p.pool_size);
  }
  out += fmt::format("{:<9} {:>4}  {:>6.1f}%  {:>6.1f}%\n", "all", r.n, pct(r.top1, r.n), pct(r.top3, r.n));
  for (const auto& c : r.results) {
    if (c.top1) continue;
    out += fmt::format("miss: [{}] \"{}\" expected {} got {} ({:.3f}{})\n", c.probe.difficulty, c.probe.intent,
                       c.probe.expected.value_or("fallback"), c.match.bundle.id, c.match.similarity,
                       c.match.fell_back ? ", fallback" : "");
  }
  return out;
}

WhisperReport run_whisper_benchmark(const std::vector<WhisperCase>& cases,
                                    const std::vector<CrossWhisperPair>& pairs, const runtime::RoomState& scenario,
                                    policy::PolicyBackend& policy, const ground::Embedder& embedder,
                                    const BundleCatalog& catalog) {
  WhisperReport r;
  r.policy_id = policy.id();
  const auto& grounding = scenario.config.grounding;

  auto owner_of = [&](const AgentId& id) {
    const auto& a = scenario.agent(id);
    if (!a.owner) throw Error(Errc::validation, "agent '" + id + "' has no owning player");
    return *a.owner;
  };

  for (const auto& c : cases) {
    whisper::Whisper w{owner_of(c.agent), c.agent, c.target, c.text, 0};
    WhisperCaseResult res;
    res.whisper = c;

    // The plan is recomputed against the same snapshot the room will see in
    // order to report similarities and fallback flags.
    whisper::validate_whisper(w, scenario);
    const auto plan = whisper::route_whisper(w) == whisper::WhisperRoute::to_other
                          ? whisper::whisper_to_other(w, scenario, policy, embedder, catalog, grounding)
                          : whisper::whisper_to_self(w, scenario, embedder, catalog, grounding);
    res.fell_back = plan.fell_back();
    res.similarity = plan.is_self() ? plan.self->similarity : plan.talk->similarity;

    runtime::Room room(scenario, catalog, embedder, policy);
    res.event_id = room.submit_whisper(w);
    for (const auto& e : room.advance_round()) {
      if (e.event_id != res.event_id) continue;
      res.kind = e.kind;
      if (e.bundle_pair) {
        res.talk = e.bundle_pair->talk;
        res.nontalk = e.bundle_pair->nontalk;
      }
      res.self = e.self_bundle;
      res.dialogue = e.dialogue;
    }

    if (c.condition == WhisperCondition::to_other) {
      res.auto_aligned = c.expected && res.talk == c.expected;
    } else if (c.expected) {
      res.auto_aligned = !res.fell_back && res.self == c.expected;
    } else {
      res.auto_aligned = res.fell_back;
    }

    auto& rates = c.condition == WhisperCondition::to_other ? r.to_other : r.to_self;
    ++rates.n;
    if (c.annotation == "success") ++rates.success;
    if (c.annotation == "partial") ++rates.partial;
    if (c.annotation == "failure") ++rates.failure;
    if (c.failure_mode) ++rates.failure_modes[*c.failure_mode];
    rates.auto_aligned += res.auto_aligned;
    r.results.push_back(std::move(res));
  }

  for (const auto& p : pairs) {
    const auto player = owner_of(p.agent);
    whisper::Whisper a{player, p.agent, p.target, p.whisper, 0};
    whisper::Whisper b{player, p.agent, p.target, p.opposing, 0};
    const auto plan_a = whisper::whisper_to_other(a, scenario, policy, embedder, catalog, grounding);
    const auto plan_b = whisper::whisper_to_other(b, scenario, policy, embedder, catalog, grounding);
    CrossResult cr;
    cr.pair = p;
    cr.talk = plan_a.talk->bundle.id;
    cr.opposing_talk = plan_b.talk->bundle.id;
    if (plan_a.nontalk) cr.nontalk = plan_a.nontalk->bundle.id;
    if (plan_b.nontalk) cr.opposing_nontalk = plan_b.nontalk->bundle.id;
    cr.flipped = cr.talk != cr.opposing_talk;
    r.flips += cr.flipped;
    r.cross.push_back(std::move(cr));
  }
  return r;
}

namespace {

Json rates_json(const ConditionRates& c) {
  return {{"n", c.n},
          {"success", c.success},
          {"partial", c.partial},
          {"failure", c.failure},
          {"aligned_rate", c.aligned_rate()},
          {"auto_aligned", c.auto_aligned},
          {"auto_aligned_rate", c.auto_rate()},
          {"failure_modes", c.failure_modes}};
}

Json opt_json(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

}  // namespace

Json to_json(const WhisperReport& r) {
  Json results = Json::array();
  for (const auto& c : r.results) {
    results.push_back({{"id", c.whisper.id},
                       {"text", c.whisper.text},
                       {"condition", c.whisper.condition == WhisperCondition::to_other ? "to_other" : "to_self"},
                       {"agent", c.whisper.agent},
                       {"target", opt_json(c.whisper.target)},
                       {"expected", opt_json(c.whisper.expected)},
                       {"event_id", c.event_id},
                       {"kind", to_string(c.kind)},
                       {"talk", opt_json(c.talk)},
                       {"nontalk", opt_json(c.nontalk)},
                       {"self", opt_json(c.self)},
                       {"fell_back", c.fell_back},
                       {"similarity", c.similarity},
                       {"dialogue", opt_json(c.dialogue)},
                       {"annotation", c.whisper.annotation},
                       {"failure_mode", opt_json(c.whisper.failure_mode)},
                       {"auto_aligned", c.auto_aligned}});
  }
  Json cross = Json::array();
  for (const auto& c : r.cross) {
    cross.push_back({{"id", c.pair.id},
                     {"whisper", c.pair.whisper},
                     {"opposing", c.pair.opposing},
                     {"talk", c.talk},
                     {"opposing_talk", c.opposing_talk},
                     {"nontalk", opt_json(c.nontalk)},
                     {"opposing_nontalk", opt_json(c.opposing_nontalk)},
                     {"flipped", c.flipped}});
  }
  return {{"report", "whisper_benchmark"},
          {"policy", r.policy_id},
          {"to_other", rates_json(r.to_other)},
          {"to_self", rates_json(r.to_self)},
          {"cross_whisper", {{"pairs", r.cross.size()}, {"flips", r.flips}, {"cases", std::move(cross)}}},
          {"cases", std::move(results)}};
}

std::string format_table(const WhisperReport& r) {
  std::string out = fmt::format("# whisper benchmark, policy {}\n", r.policy_id);
  out += fmt::format("{:<9} {:>4}  {:>7}  {:>7}  {:>7}  {:>8}  {:>12}\n", "condition", "n", "success", "partial",
                     "failure", "aligned", "auto-aligned");
  auto row = [&](const char* name, const ConditionRates& c) {
    out += fmt::format("{:<9} {:>4}  {:>7}  {:>7}  {:>7}  {:>7.1f}%  {:>11.1f}%\n", name, c.n, c.success, c.partial,
                       c.failure, 100.0 * c.aligned_rate(), 100.0 * c.auto_rate());
    for (const auto& [mode, n] : c.failure_modes) out += fmt::format("  {}: {}\n", mode, n);
  };
  row("to_other", r.to_other);
  row("to_self", r.to_self);
  out += fmt::format("cross-whisper flips: {}/{}\n", r.flips, r.cross.size());
  for (const auto& c : r.cross) {
    out += fmt::format("  {}: {} -> {}{}\n", c.pair.id, c.talk, c.opposing_talk, c.flipped ? "" : " (no flip)");
  }
  return out;
}

}  // namespace bounded::harness
