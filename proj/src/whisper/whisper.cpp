#include "bounded/whisper/whisper.hpp"

#include "bounded/core/errors.hpp"

namespace bounded::whisper {

std::string_view to_string(WhisperRoute r) {
  return r == WhisperRoute::to_other ? "to_other" : "to_self";
}

WhisperRoute route_whisper(const Whisper& w) {
  if (w.target_id && *w.target_id != w.agent_id) return WhisperRoute::to_other;
  return WhisperRoute::to_self;
}

void validate_whisper(const Whisper& w, const runtime::RoomState& room) {
  if (w.text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(Errc::empty_intent, "whisper text is empty");
  }
  if (w.text.size() > kMaxWhisperChars) {
    throw Error(Errc::validation, "whisper longer than " + std::to_string(kMaxWhisperChars) + " characters");
  }
  const auto& agent = room.agent(w.agent_id);
  if (!agent.owner || *agent.owner != w.player_id) {
    throw Error(Errc::ownership, "player '" + w.player_id + "' does not own agent '" + w.agent_id + "'");
  }
  if (route_whisper(w) == WhisperRoute::to_other) room.agent(*w.target_id);
}

bool PlannedBehavior::fell_back() const {
  if (self) return self->fell_back;
  return talk && talk->fell_back;
}

PlannedBehavior whisper_to_other(const Whisper& w, const runtime::RoomState& room,
                                 policy::PolicyBackend& policy, const ground::Embedder& embedder,
                                 const BundleCatalog& catalog, const ground::GroundingConfig& config) {
  if (route_whisper(w) != WhisperRoute::to_other) contract_violation("whisper_to_other on a to-self whisper");
  const auto& agent = room.agent(w.agent_id);
  room.agent(*w.target_id);

  policy::ActiveStimulus stimulus{policy::StimulusKind::whisper, PriorityClass::A, w.text, std::nullopt};
  auto context = runtime::build_context(room, w.agent_id, std::move(stimulus), w.target_id, false);
  auto proposal = policy.propose(context);

  auto [talk, nontalk] =
      ground::ground_pair(proposal.talk_name, proposal.nontalk_name, catalog, agent.emotion, embedder, config);

  PlannedBehavior plan;
  plan.talk = std::move(talk);
  plan.nontalk = std::move(nontalk);
  plan.proposal = std::move(proposal);
  plan.target = w.target_id;
  plan.priority = PriorityClass::A;
  plan.source = 0;
  if (plan.talk->bundle.pool == PoolKind::talk) {
    plan.dialogue_request = DialogueRequest{std::move(context), w.text};
  }
  return plan;
}

PlannedBehavior whisper_to_self(const Whisper& w, const runtime::RoomState& room,
                                const ground::Embedder& embedder, const BundleCatalog& catalog,
                                const ground::GroundingConfig& config) {
  const auto& agent = room.agent(w.agent_id);
  PlannedBehavior plan;
  plan.self = ground::ground_self(w.text, catalog, agent.emotion, embedder, config);
  plan.priority = PriorityClass::A;
  plan.source = 0;
  return plan;
}

}  // namespace bounded::whisper
