#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bounded/core/catalog.hpp"
#include "bounded/core/json.hpp"
#include "bounded/ground/embedder.hpp"
#include "bounded/policy/policy.hpp"
#include "bounded/runtime/room_state.hpp"
#include "bounded/runtime/trace.hpp"

namespace bounded::harness {

enum class Setup { baseline, s1, s2, s3, s4 };

std::string_view to_string(Setup s);
std::optional<Setup> parse_setup(std::string_view s);
inline constexpr Setup kAllSetups[] = {Setup::baseline, Setup::s1, Setup::s2, Setup::s3, Setup::s4};

struct TrialConfig {
  Setup setup = Setup::baseline;
  AgentId actor = "A";
  AgentId target = "B";
  BundleId trigger = "talk_debate";
  bool decay_enabled = true;
  double alpha = 0.2;
  int n_trials = 20;
  std::uint64_t seed = 1;
  runtime::RoomConfig room;
  // Rounds simulated per trial. The room keeps running after the injected
  // chain ends so autonomy share is measured over the same window in every
  // condition.
  Tick horizon = 600;
  // Stop as soon as the injected chain ends; used for large Monte Carlo runs
  // where only the terminal depth matters.
  bool chain_only = false;
};

// Actor, target and trigger bundle for a named setup:
//   baseline A->B Debate, S1 B->C, S2 C->D, S3 E->A, S4 A->B Discuss common interests.
TrialConfig make_trial_config(Setup setup, bool decay_enabled, int n_trials, std::uint64_t seed);

enum class Termination { natural, depth_cap, event_ceiling, horizon };

std::string_view to_string(Termination t);

struct TrialMetrics {
  std::uint64_t seed = 0;
  int max_depth = 0;
  Termination termination = Termination::natural;
  double autonomy_share = 0.0;
  std::map<int, int> events_by_source;
  int n_events = 0;
  int chain_events = 0;
  Tick chain_ended_at = 0;
};

struct TrialInputs {
  // Scenario room; relationship scores are reset to 0 for every trial.
  runtime::RoomState scenario;
  std::shared_ptr<const BundleCatalog> catalog;
  std::shared_ptr<const ground::Embedder> embedder;
  std::shared_ptr<policy::PolicyBackend> policy;
};

// Seed of trial `index` in a batch.
std::uint64_t trial_seed(std::uint64_t batch_seed, int index);

TrialMetrics run_trial(const TrialConfig& config, const TrialInputs& inputs, std::uint64_t seed,
                       runtime::TraceSink* sink = nullptr);

// count(source == 1) / count(all events). Throws Error(Errc::empty_trace).
double compute_autonomy_share(const std::vector<Event>& trace);

// Terminal max-source distribution of a single pairwise chain, indexed by
// depth 2..depth_cap.
std::map<int, double> depth_distribution_oracle(double alpha, int depth_cap);

double total_variation(const std::map<int, double>& p, const std::map<int, double>& q);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(const std::vector<double>& xs);

// Exact two-sided binomial test of k successes in n against p0, summing the
// probabilities of all outcomes no more likely than k.
double binomial_two_sided(int k, int n, double p0 = 0.5);

struct ConditionReport {
  Setup setup = Setup::baseline;
  AgentId actor;
  AgentId target;
  BundleId trigger;
  bool decay_enabled = true;
  double alpha = 0.2;
  int n = 0;
  Summary depth;
  int natural = 0;
  int depth_cap = 0;
  int event_ceiling = 0;
  int horizon = 0;
  Summary autonomy;
  // Two-sided binomial p-value of the natural-vs-bounded split against 0.5.
  double split_p_value = 1.0;
  std::vector<TrialMetrics> trials;
};

ConditionReport run_trial_batch(const TrialConfig& config, const TrialInputs& inputs);

struct BatchReport {
  Tick horizon = 600;
  std::uint64_t seed = 1;
  std::vector<ConditionReport> conditions;
};

Json to_json(const TrialMetrics& m);
Json to_json(const ConditionReport& c);
Json to_json(const BatchReport& r);
// Aligned plain-text table, one row per condition.
std::string format_table(const BatchReport& r);
std::string format_oracle(const std::map<int, double>& table, double alpha, int depth_cap);

}  // namespace bounded::harness
