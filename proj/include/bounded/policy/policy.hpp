#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bounded/converge/converge.hpp"
#include "bounded/core/json.hpp"
#include "bounded/core/types.hpp"
#include "bounded/ground/embedder.hpp"

namespace bounded::policy {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kDefaultHistoryWindow = 20;

struct AgentView {
  AgentId id;
  std::string name;
  Emotion emotion = Emotion::neutral;
  std::map<AgentId, int> relationship;
};

enum class StimulusKind { whisper, event, heartbeat, trigger };

std::string_view to_string(StimulusKind k);

struct ActiveStimulus {
  StimulusKind kind = StimulusKind::heartbeat;
  PriorityClass priority = PriorityClass::C;
  // Whisper text, or the name of the incoming event's talk bundle.
  std::string text;
  std::optional<Event> event;
};

struct PolicyContext {
  std::string room_id;
  Tick now = 0;
  std::vector<AgentView> agents;
  // Most recent events, oldest first.
  std::vector<Event> history;
  ActiveStimulus stimulus;
  AgentId acting_agent;
  std::optional<AgentId> target;
  std::optional<std::string> persona;
  // Heartbeat actions with no interlocutor ask for a to-self intent.
  bool self_directed = false;

  std::string display_name(const AgentId& id) const;
};

Json context_to_json(const PolicyContext& context);

struct PolicyProposal {
  std::string talk_name;
  std::optional<std::string> nontalk_name;
  std::optional<std::string> dialogue;
  // Free-text intent for self-directed contexts.
  std::optional<std::string> self_intent;
  std::optional<std::string> rationale;

  bool operator==(const PolicyProposal&) const = default;
};

// Names of the grounded bundles a dialogue line is generated for.
struct DialoguePair {
  BehaviorBundle talk;
  std::optional<BehaviorBundle> nontalk;
};

// Behaviour generator. Failures throw Error(Errc::policy_failure) with a
// PolicyFailureKind. Implementations must tolerate concurrent calls made on
// behalf of distinct agents.
class PolicyBackend {
 public:
  virtual ~PolicyBackend() = default;

  virtual PolicyProposal propose(const PolicyContext& context) = 0;
  // `attempt` is 0 for the first request and 1 for the single regeneration
  // after a duplicate.
  virtual std::string generate_dialogue(const PolicyContext& context, const DialoguePair& pair,
                                        int attempt) = 0;
  virtual std::string id() const = 0;
};

struct DedupGate {
  const std::vector<converge::Utterance>* recent = nullptr;
  Tick now = 0;
  Tick window = 60;
  const ground::Embedder* embedder = nullptr;
  double threshold = 0.9;
};

enum class DialogueStatus { fresh, regenerated, suppressed };

std::string_view to_string(DialogueStatus s);

struct DialogueOutcome {
  std::optional<std::string> text;
  DialogueStatus status = DialogueStatus::fresh;
};

// Generates a line for a talk bundle, regenerating once on a duplicate and
// suppressing the line if the regeneration is also a duplicate.
DialogueOutcome generate_dialogue(PolicyBackend& backend, const PolicyContext& context,
                                  const DialoguePair& pair, const DedupGate& gate);

}  // namespace bounded::policy
