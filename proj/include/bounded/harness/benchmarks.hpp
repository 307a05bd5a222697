#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bounded/core/catalog.hpp"
#include "bounded/core/json.hpp"
#include "bounded/ground/embedder.hpp"
#include "bounded/ground/grounding.hpp"
#include "bounded/policy/policy.hpp"
#include "bounded/runtime/room_state.hpp"

namespace bounded::harness {

inline constexpr const char* kDifficulties[] = {"paraphrase", "indirect", "adjacent", "out-of-scope"};
inline constexpr const char* kFailureModes[] = {"talk_misalignment", "action_misalignment", "over_softened",
                                                "unclear_whisper", "semantic_drift"};

struct ProbeCase {
  std::string intent;
  PoolKind pool = PoolKind::talk;
  // Absent when the probe expects a fallback.
  std::optional<BundleId> expected;
  std::string difficulty;
};

// JSONL: {"intent", "pool", "expected" | null, "difficulty"}.
// Throws Error(parse | unknown_pool | validation) with line numbers.
std::vector<ProbeCase> parse_probes(std::istream& in);
std::vector<ProbeCase> load_probes(const std::filesystem::path& path);

struct ProbeResult {
  ProbeCase probe;
  ground::GroundingMatch match;
  bool top1 = false;
  bool top3 = false;
};

struct PoolAccuracy {
  PoolKind pool = PoolKind::talk;
  int n = 0;
  int top1 = 0;
  int top3 = 0;
  double mean_top1_similarity = 0.0;
  std::size_t pool_size = 0;
  // Bundles left after the content filter for a neutral agent.
  std::size_t candidates = 0;
};

struct GroundingReport {
  std::string model_id;
  int max_pglv = 3;
  double threshold = 0.3;
  std::vector<ProbeResult> results;
  std::vector<PoolAccuracy> pools;
  int n = 0;
  int top1 = 0;
  int top3 = 0;
};

// Probes are grounded for a neutral agent. Top-1 is correct when the
// returned bundle is the expected one, or when a fallback was expected and
// happened. Top-3 looks for the expected id in the ranked list.
// Throws Error(unknown_bundle) when an expected id is not in the probe's pool.
GroundingReport run_grounding_benchmark(const std::vector<ProbeCase>& probes, const ground::Embedder& embedder,
                                        const BundleCatalog& catalog, const ground::GroundingConfig& config);

// Pool sizes with and without the content filter, for catalogs with no probes.
std::vector<PoolAccuracy> pool_sizes(const BundleCatalog& catalog, const ground::GroundingConfig& config);

Json to_json(const GroundingReport& r);
std::string format_table(const GroundingReport& r);

enum class WhisperCondition { to_other, to_self };

struct WhisperCase {
  std::string id;
  std::string text;
  WhisperCondition condition = WhisperCondition::to_other;
  AgentId agent;
  std::optional<AgentId> target;
  // Expected talk bundle (to-other) or self bundle (to-self); absent when a
  // fallback is expected.
  std::optional<BundleId> expected;
  std::string annotation;  // success | partial | failure
  std::optional<std::string> failure_mode;
};

struct CrossWhisperPair {
  std::string id;
  AgentId agent;
  AgentId target;
  std::string whisper;
  std::string opposing;
};

std::vector<WhisperCase> parse_whisper_cases(std::istream& in);
std::vector<WhisperCase> load_whisper_cases(const std::filesystem::path& path);
std::vector<CrossWhisperPair> parse_cross_pairs(std::istream& in);
std::vector<CrossWhisperPair> load_cross_pairs(const std::filesystem::path& path);

struct WhisperCaseResult {
  WhisperCase whisper;
  EventId event_id = 0;
  EventKind kind = EventKind::whisper;
  std::optional<BundleId> talk;
  std::optional<BundleId> nontalk;
  std::optional<BundleId> self;
  bool fell_back = false;
  double similarity = 0.0;
  std::optional<std::string> dialogue;
  // Whether the grounded result matches the case's expected direction.
  bool auto_aligned = false;
};

struct ConditionRates {
  int n = 0;
  int success = 0;
  int partial = 0;
  int failure = 0;
  int auto_aligned = 0;
  std::map<std::string, int> failure_modes;

  double aligned_rate() const { return n == 0 ? 0.0 : static_cast<double>(success + partial) / n; }
  double auto_rate() const { return n == 0 ? 0.0 : static_cast<double>(auto_aligned) / n; }
};

struct CrossResult {
  CrossWhisperPair pair;
  BundleId talk;
  BundleId opposing_talk;
  std::optional<BundleId> nontalk;
  std::optional<BundleId> opposing_nontalk;
  bool flipped = false;
};

struct WhisperReport {
  std::string policy_id;
  std::vector<WhisperCaseResult> results;
  ConditionRates to_other;
  ConditionRates to_self;
  std::vector<CrossResult> cross;
  int flips = 0;
};

// Each case runs in a fresh room built from `scenario`: the owner of the
// case's agent submits the whisper and one round is advanced.
WhisperReport run_whisper_benchmark(const std::vector<WhisperCase>& cases,
                                    const std::vector<CrossWhisperPair>& pairs, const runtime::RoomState& scenario,
                                    policy::PolicyBackend& policy, const ground::Embedder& embedder,
                                    const BundleCatalog& catalog);

Json to_json(const WhisperReport& r);
std::string format_table(const WhisperReport& r);

}  // namespace bounded::harness
