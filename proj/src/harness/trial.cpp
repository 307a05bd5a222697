#include "bounded/harness/trial.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bounded/converge/converge.hpp"
#include "bounded/core/errors.hpp"
#include "bounded/core/rng.hpp"
#include "bounded/runtime/room.hpp"

namespace bounded::harness {

namespace {

// Upper bound on rounds in chain-only mode; a chain that outlives it is a bug.
constexpr Tick kChainOnlyLimit = 100'000;

}  // namespace

std::string_view to_string(Setup s) {
  switch (s) {
    case Setup::baseline: return "baseline";
    case Setup::s1: return "S1";
    case Setup::s2: return "S2";
    case Setup::s3: return "S3";
    case Setup::s4: return "S4";
  }
  return "?";
}

std::optional<Setup> parse_setup(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "baseline") return Setup::baseline;
  if (lower == "s1") return Setup::s1;
  if (lower == "s2") return Setup::s2;
  if (lower == "s3") return Setup::s3;
  if (lower == "s4") return Setup::s4;
  return std::nullopt;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::natural: return "natural";
    case Termination::depth_cap: return "depth_cap";
    case Termination::event_ceiling: return "event_ceiling";
    case Termination::horizon: return "horizon";
  }
  return "?";
}

TrialConfig make_trial_config(Setup setup, bool decay_enabled, int n_trials, std::uint64_t seed) {
  TrialConfig c;
  c.setup = setup;
  c.decay_enabled = decay_enabled;
  c.n_trials = n_trials;
  c.seed = seed;
  switch (setup) {
    case Setup::baseline: c.actor = "A", c.target = "B"; break;
    case Setup::s1: c.actor = "B", c.target = "C"; break;
    case Setup::s2: c.actor = "C", c.target = "D"; break;
    case Setup::s3: c.actor = "E", c.target = "A"; break;
    case Setup::s4:
      c.actor = "A", c.target = "B";
      c.trigger = "talk_common_interests";
      break;
  }
  return c;
}

std::uint64_t trial_seed(std::uint64_t batch_seed, int index) {
  return Rng::derive(batch_seed, static_cast<std::uint64_t>(index));
}

double compute_autonomy_share(const std::vector<Event>& trace) {
  if (trace.empty()) throw Error(Errc::empty_trace, "autonomy share of an empty trace");
  const auto autonomous = std::count_if(trace.begin(), trace.end(), [](const Event& e) { return e.source == 1; });
  return static_cast<double>(autonomous) / static_cast<double>(trace.size());
}

TrialMetrics run_trial(const TrialConfig& config, const TrialInputs& inputs, std::uint64_t seed,
                       runtime::TraceSink* sink) {
  if (config.horizon < 1 && !config.chain_only) throw Error(Errc::validation, "trial horizon must be >= 1");
  runtime::RoomState state = inputs.scenario;
  state.config = config.room;
  state.config.alpha = config.alpha;
  state.config.decay_enabled = config.decay_enabled;
  state.config.master_seed = seed;
  state.rng_seed = seed;
  state.history.clear();
  state.logical_clock = 0;
  for (auto& a : state.agents) {
    for (auto& [peer, score] : a.relationship) score = 0;
    a.talk_state = 0;
  }

  runtime::Room room(std::move(state), *inputs.catalog, *inputs.embedder, *inputs.policy, sink);
  Event trigger;
  trigger.actor = config.actor;
  trigger.target = config.target;
  trigger.source = 0;
  trigger.kind = EventKind::injected_social;
  trigger.bundle_pair = BundlePair{config.trigger, std::nullopt};
  const EventId root = room.inject_event(trigger);

  const Tick limit = config.chain_only ? kChainOnlyLimit : config.horizon;
  while (room.now() < limit) {
    room.advance_round();
    if (config.chain_only) {
      const auto* chain = room.chain(root);
      if (chain == nullptr || !chain->open()) break;
    }
  }

  TrialMetrics m;
  m.seed = seed;
  const auto* chain = room.chain(root);
  if (chain == nullptr) throw Error(Errc::contract_violation, "injected chain was never emitted");
  m.max_depth = chain->max_source;
  m.chain_events = chain->events;
  if (chain->open()) {
    m.termination = Termination::horizon;
  } else if (chain->halted) {
    m.termination = *chain->halted == runtime::HaltReason::depth_cap ? Termination::depth_cap
                                                                       : Termination::event_ceiling;
  } else {
    m.termination = Termination::natural;
  }
  m.chain_ended_at = chain->ended_at.value_or(room.now());
  const auto& history = room.state().history;
  for (const auto& e : history) ++m.events_by_source[e.source];
  m.n_events = static_cast<int>(history.size());
  m.autonomy_share = compute_autonomy_share(history);
  return m;
}

std::map<int, double> depth_distribution_oracle(double alpha, int depth_cap) {
  if (alpha < 0.0) throw Error(Errc::validation, "alpha must be >= 0");
  std::map<int, double> out;
  // The reply to the source-0 trigger always happens, so depth 2 is the floor.
  if (depth_cap <= 2) {
    out[2] = 1.0;
    return out;
  }
  auto p_reply = [alpha](int s) { return std::clamp(1.0 - (s - 1) * alpha, 0.0, 1.0); };
  double survive = 1.0;
  for (int d = 2; d < depth_cap; ++d) {
    out[d] = survive * (1.0 - p_reply(d));
    survive *= p_reply(d);
  }
  out[depth_cap] = survive;
  return out;
}

double total_variation(const std::map<int, double>& p, const std::map<int, double>& q) {
  double tv = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    tv += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q) {
    if (!p.contains(k)) tv += std::abs(v);
  }
  return tv / 2.0;
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

double binomial_two_sided(int k, int n, double p0) {
  if (n < 0 || k < 0 || k > n) throw Error(Errc::validation, "binomial test needs 0 <= k <= n");
  if (p0 <= 0.0 || p0 >= 1.0) throw Error(Errc::validation, "binomial p0 must be in (0,1)");
  auto log_pmf = [&](int i) {
    return std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p0) +
           (n - i) * std::log1p(-p0);
  };
  const double observed = log_pmf(k);
  double p = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double l = log_pmf(i);
    // Relative slack so outcomes equally likely as k count despite rounding.
    if (l <= observed + 1e-7) p += std::exp(l);
  }
  return std::min(1.0, p);
}

ConditionReport run_trial_batch(const TrialConfig& config, const TrialInputs& inputs) {
  if (config.n_trials < 1) throw Error(Errc::validation, "n_trials must be >= 1");
  ConditionReport r;
  r.setup = config.setup;
  r.actor = config.actor;
  r.target = config.target;
  r.trigger = config.trigger;
  r.decay_enabled = config.decay_enabled;
  r.alpha = config.alpha;
  r.n = config.n_trials;
  std::vector<double> depths;
  std::vector<double> shares;
  for (int i = 0; i < config.n_trials; ++i) {
    auto m = run_trial(config, inputs, trial_seed(config.seed, i));
    depths.push_back(m.max_depth);
    shares.push_back(m.autonomy_share);
    switch (m.termination) {
      case Termination::natural: ++r.natural; break;
      case Termination::depth_cap: ++r.depth_cap; break;
      case Termination::event_ceiling: ++r.event_ceiling; break;
      case Termination::horizon: ++r.horizon; break;
    }
    r.trials.push_back(std::move(m));
  }
  r.depth = summarize(depths);
  r.autonomy = summarize(shares);
  r.split_p_value = binomial_two_sided(r.natural, r.n);
  return r;
}

Json to_json(const TrialMetrics& m) {
  Json hist = Json::object();
  for (const auto& [s, n] : m.events_by_source) hist[std::to_string(s)] = n;
  return {{"seed", m.seed},
          {"max_depth", m.max_depth},
          {"termination", to_string(m.termination)},
          {"autonomy_share", m.autonomy_share},
          {"events_by_source", std::move(hist)},
          {"n_events", m.n_events},
          {"chain_events", m.chain_events},
          {"chain_ended_at", m.chain_ended_at}};
}

namespace {

Json summary_json(const Summary& s) { return {{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}}; }

}  // namespace

Json to_json(const ConditionReport& c) {
  Json trials = Json::array();
  for (const auto& t : c.trials) trials.push_back(to_json(t));
  return {{"setup", to_string(c.setup)},
          {"actor", c.actor},
          {"target", c.target},
          {"trigger", c.trigger},
          {"decay_enabled", c.decay_enabled},
          {"alpha", c.alpha},
          {"n", c.n},
          {"depth", summary_json(c.depth)},
          {"natural", c.natural},
          {"depth_cap", c.depth_cap},
          {"event_ceiling", c.event_ceiling},
          {"horizon", c.horizon},
          {"autonomy_share", summary_json(c.autonomy)},
          {"split_p_value", c.split_p_value},
          {"trials", std::move(trials)}};
}

Json to_json(const BatchReport& r) {
  Json conditions = Json::array();
  for (const auto& c : r.conditions) conditions.push_back(to_json(c));
  return {{"report", "decay_trials"},
          {"window", fmt::format("autonomy share counts every event in ticks [0, {}), including heartbeats "
                                 "after the injected chain ends",
                                 r.horizon)},
          {"horizon", r.horizon},
          {"seed", r.seed},
          {"conditions", std::move(conditions)}};
}

std::string format_table(const BatchReport& r) {
  std::string out;
  out += fmt::format("# autonomy share window: ticks [0, {}), post-chain heartbeats included; seed {}\n",
                     r.horizon, r.seed);
  out += fmt::format("{:<9} {:<5} {:<22} {:<6} {:>4}  {:>12}  {:>7}  {:>9}  {:>5}  {:>14}  {:>11}  {:>9}\n", "setup",
                     "pair", "trigger", "decay", "N", "depth mean", "range", "natural", "cap", "autonomy mean",
                     "range", "p");
  for (const auto& c : r.conditions) {
    out += fmt::format(
        "{:<9} {:<5} {:<22} {:<6} {:>4}  {:>5.1f} ({:>4.1f})  {:>3.0f}-{:<3.0f}  {:>4}/{:<4}  {:>5}  {:>14.3f}  "
        "{:>5.3f}-{:<5.3f}  {:>9.2e}\n",
        to_string(c.setup), c.actor + "->" + c.target, c.trigger, c.decay_enabled ? "on" : "off", c.n,
        c.depth.mean, c.depth.sd, c.depth.min, c.depth.max, c.natural, c.n, c.depth_cap + c.event_ceiling,
        c.autonomy.mean, c.autonomy.min, c.autonomy.max, c.split_p_value);
  }
  return out;
}

std::string format_oracle(const std::map<int, double>& table, double alpha, int depth_cap) {
  std::string out = fmt::format("# terminal depth distribution, alpha={} depth_cap={}\n", alpha, depth_cap);
  out += fmt::format("{:>5}  {:>10}\n", "depth", "P");
  double mean = 0.0;
  for (const auto& [d, p] : table) {
    out += fmt::format("{:>5}  {:>10.6f}\n", d, p);
    mean += d * p;
  }
  out += fmt::format("{:>5}  {:>10.6f}\n", "mean", mean);
  return out;
}

}  // namespace bounded::harness
