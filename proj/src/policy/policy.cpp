#include "bounded/policy/policy.hpp"

#include "bounded/core/errors.hpp"

namespace bounded::policy {

std::string_view to_string(StimulusKind k) {
  switch (k) {
    case StimulusKind::whisper: return "whisper";
    case StimulusKind::event: return "event";
    case StimulusKind::heartbeat: return "heartbeat";
    case StimulusKind::trigger: return "trigger";
  }
  return "?";
}

std::string_view to_string(DialogueStatus s) {
  switch (s) {
    case DialogueStatus::fresh: return "fresh";
    case DialogueStatus::regenerated: return "regenerated";
    case DialogueStatus::suppressed: return "suppressed";
  }
  return "?";
}

std::string PolicyContext::display_name(const AgentId& id) const {
  for (const auto& a : agents) {
    if (a.id == id) return a.name;
  }
  return id;
}

Json context_to_json(const PolicyContext& c) {
  Json agents = Json::array();
  for (const auto& a : c.agents) {
    Json rel = Json::object();
    for (const auto& [peer, score] : a.relationship) rel[peer] = score;
    agents.push_back({{"id", a.id},
                      {"name", a.name},
                      {"emotion", std::string(to_string(a.emotion))},
                      {"relationship", rel}});
  }
  Json history = Json::array();
  for (const auto& e : c.history) history.push_back(event_to_json(e));

  Json stimulus{{"kind", std::string(to_string(c.stimulus.kind))},
                {"priority", std::string(to_string(c.stimulus.priority))},
                {"text", c.stimulus.text},
                {"event", c.stimulus.event ? event_to_json(*c.stimulus.event) : Json()}};

  Json j{{"room_id", c.room_id},
         {"now", c.now},
         {"agents", agents},
         {"history", history},
         {"stimulus", stimulus},
         {"acting_agent", c.acting_agent},
         {"target", c.target ? Json(*c.target) : Json()},
         {"persona", c.persona ? Json(*c.persona) : Json()},
         {"self_directed", c.self_directed}};
  // The whisper is placed verbatim in the dialogue section so that dialogue
  // generation is conditioned on it.
  if (c.stimulus.kind == StimulusKind::whisper) {
    j["dialogue_context"] = {{"whisper", c.stimulus.text}};
  }
  return j;
}

DialogueOutcome generate_dialogue(PolicyBackend& backend, const PolicyContext& context,
                                  const DialoguePair& pair, const DedupGate& gate) {
  if (pair.talk.pool != PoolKind::talk) {
    contract_violation("generate_dialogue: bundle '" + pair.talk.id + "' is not a dialogue action");
  }
  auto duplicate = [&](const std::string& text) {
    if (gate.recent == nullptr || gate.embedder == nullptr) return false;
    return converge::is_duplicate_dialogue(text, *gate.recent, gate.now, gate.window, *gate.embedder,
                                           gate.threshold);
  };

  std::string first = backend.generate_dialogue(context, pair, 0);
  if (!duplicate(first)) return {std::move(first), DialogueStatus::fresh};
  std::string second = backend.generate_dialogue(context, pair, 1);
  if (!duplicate(second)) return {std::move(second), DialogueStatus::regenerated};
  return {std::nullopt, DialogueStatus::suppressed};
}

}  // namespace bounded::policy
