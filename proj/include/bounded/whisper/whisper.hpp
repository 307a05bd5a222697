#pragma once

#include <optional>
#include <string>

#include "bounded/core/catalog.hpp"
#include "bounded/core/types.hpp"
#include "bounded/ground/grounding.hpp"
#include "bounded/policy/policy.hpp"
#include "bounded/runtime/room_state.hpp"

namespace bounded::whisper {

inline constexpr std::size_t kMaxWhisperChars = 280;

struct Whisper {
  PlayerId player_id;
  AgentId agent_id;
  std::optional<AgentId> target_id;
  std::string text;
  Tick logical_time = 0;
};

enum class WhisperRoute { to_other, to_self };

std::string_view to_string(WhisperRoute r);

// ToOther iff a target other than the whispered agent is named.
WhisperRoute route_whisper(const Whisper& w);

// Non-empty text within the length cap, known agent, owned by the sender.
// Throws Error(validation | empty_intent | unknown_agent | ownership).
void validate_whisper(const Whisper& w, const runtime::RoomState& room);

struct DialogueRequest {
  policy::PolicyContext context;
  // Verbatim whisper text when the plan is whisper-conditioned.
  std::optional<std::string> whisper_text;
};

// A grounded, executable plan. Pair plans carry a talk match and optionally a
// non-talk match; self plans carry exactly one self match.
struct PlannedBehavior {
  std::optional<ground::GroundingMatch> talk;
  std::optional<ground::GroundingMatch> nontalk;
  std::optional<ground::GroundingMatch> self;
  std::optional<DialogueRequest> dialogue_request;
  std::optional<policy::PolicyProposal> proposal;
  std::optional<AgentId> target;
  PriorityClass priority = PriorityClass::A;
  int source = 0;

  bool is_self() const { return self.has_value(); }
  // True when the primary (talk or self) side fell back to a safe default.
  bool fell_back() const;
};

// Policy-guided bundle-pair selection followed by grounding. Throws
// Error(policy_failure) from the backend; grounding itself never fails.
PlannedBehavior whisper_to_other(const Whisper& w, const runtime::RoomState& room,
                                 policy::PolicyBackend& policy, const ground::Embedder& embedder,
                                 const BundleCatalog& catalog, const ground::GroundingConfig& config);

// Direct match of the whisper text against the to-self pool. Never calls a
// policy backend.
PlannedBehavior whisper_to_self(const Whisper& w, const runtime::RoomState& room,
                                const ground::Embedder& embedder, const BundleCatalog& catalog,
                                const ground::GroundingConfig& config);

}  // namespace bounded::whisper
