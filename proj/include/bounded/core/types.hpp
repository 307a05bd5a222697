#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bounded {

using AgentId = std::string;
using PlayerId = std::string;
using BundleId = std::string;
using EventId = std::uint64_t;
// Logical clock. One tick models one second.
using Tick = std::int64_t;

enum class Emotion { happy, sad, angry, neutral };

enum class PoolKind { talk, non_talk, to_self };

// A > B > C. The enumerator values are chosen so that `<` on the underlying
// value means "lower priority".
enum class PriorityClass { C = 0, B = 1, A = 2 };

enum class EventKind { injected_social, autonomous_action, reply, whisper, trigger, self_action, fallback };

inline constexpr std::uint32_t kTalkExecuting = 1u << 0;

std::string_view to_string(Emotion e);
std::string_view to_string(PoolKind p);
std::string_view to_string(PriorityClass p);
std::string_view to_string(EventKind k);

std::optional<Emotion> parse_emotion(std::string_view s);
std::optional<PoolKind> parse_pool(std::string_view s);
std::optional<PriorityClass> parse_priority(std::string_view s);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct BehaviorBundle {
  BundleId id;
  std::string name;
  PoolKind pool = PoolKind::talk;
  std::set<Emotion> emotion_valence;
  int pglv = 1;
  int relationship_delta = 0;
  bool is_safe_default = false;
  // Opaque animation/navigation payload; carried verbatim as JSON text.
  std::map<std::string, std::string> metadata;

  bool operator==(const BehaviorBundle&) const = default;
};

struct BundlePair {
  BundleId talk;
  std::optional<BundleId> nontalk;

  bool operator==(const BundlePair&) const = default;
};

struct Event {
  EventId event_id = 0;
  Tick logical_time = 0;
  AgentId actor;
  std::optional<AgentId> target;
  int source = 0;
  EventKind kind = EventKind::injected_social;
  std::optional<BundlePair> bundle_pair;
  std::optional<BundleId> self_bundle;
  std::optional<std::string> dialogue;
  std::optional<std::string> whisper_text;

  // Engine bookkeeping: the event this one answers, and the id of the event
  // that started its reply chain (itself for chain roots).
  std::optional<EventId> reply_to;
  EventId chain_root = 0;
  bool superseded = false;

  bool operator==(const Event&) const = default;
};

// Checks the source/kind invariants. Returns an explanation when violated.
std::optional<std::string> check_event_invariants(const Event& e);

struct AgentState {
  AgentId agent_id;
  std::string display_name;
  Emotion emotion = Emotion::neutral;
  std::map<AgentId, int> relationship;
  std::uint32_t talk_state = 0;
  Tick heartbeat_period = 40;
  Tick next_heartbeat = 0;
  std::uint64_t rng_seed = 0;
  std::optional<PlayerId> owner;
  std::optional<std::string> persona;
  bool harness_driven = false;

  bool talk_locked() const { return (talk_state & kTalkExecuting) != 0; }
  int score_toward(const AgentId& peer) const;

  bool operator==(const AgentState&) const = default;
};

}  // namespace bounded
