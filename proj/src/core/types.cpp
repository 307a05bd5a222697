#include "bounded/core/types.hpp"

#include <array>
#include <utility>

namespace bounded {

namespace {

constexpr std::array<std::pair<Emotion, std::string_view>, 4> kEmotions{{
    {Emotion::happy, "happy"},
    {Emotion::sad, "sad"},
    {Emotion::angry, "angry"},
    {Emotion::neutral, "neutral"},
}};

constexpr std::array<std::pair<PoolKind, std::string_view>, 3> kPools{{
    {PoolKind::talk, "talk"},
    {PoolKind::non_talk, "non_talk"},
    {PoolKind::to_self, "to_self"},
}};

constexpr std::array<std::pair<PriorityClass, std::string_view>, 3> kPriorities{{
    {PriorityClass::A, "A"},
    {PriorityClass::B, "B"},
    {PriorityClass::C, "C"},
}};

constexpr std::array<std::pair<EventKind, std::string_view>, 7> kKinds{{
    {EventKind::injected_social, "injected_social"},
    {EventKind::autonomous_action, "autonomous_action"},
    {EventKind::reply, "reply"},
    {EventKind::whisper, "whisper"},
    {EventKind::trigger, "trigger"},
    {EventKind::self_action, "self_action"},
    {EventKind::fallback, "fallback"},
}};

template <typename T, std::size_t N>
std::string_view name_of(const std::array<std::pair<T, std::string_view>, N>& table, T value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename T, std::size_t N>
std::optional<T> value_of(const std::array<std::pair<T, std::string_view>, N>& table,
                          std::string_view s) {
  for (const auto& [v, name] : table) {
    if (name == s) return v;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Emotion e) { return name_of(kEmotions, e); }
std::string_view to_string(PoolKind p) { return name_of(kPools, p); }
std::string_view to_string(PriorityClass p) { return name_of(kPriorities, p); }
std::string_view to_string(EventKind k) { return name_of(kKinds, k); }

std::optional<Emotion> parse_emotion(std::string_view s) { return value_of(kEmotions, s); }
std::optional<PoolKind> parse_pool(std::string_view s) { return value_of(kPools, s); }
std::optional<PriorityClass> parse_priority(std::string_view s) { return value_of(kPriorities, s); }
std::optional<EventKind> parse_event_kind(std::string_view s) { return value_of(kKinds, s); }

std::optional<std::string> check_event_invariants(const Event& e) {
  const bool injected_kind = e.kind == EventKind::injected_social || e.kind == EventKind::whisper ||
                             e.kind == EventKind::trigger;
  if (e.source < 0) return "negative source";
  if ((e.source == 0) != injected_kind) {
    return "source 0 is reserved for injected/whisper/trigger events (kind " +
           std::string(to_string(e.kind)) + ", source " + std::to_string(e.source) + ")";
  }
  if (e.kind == EventKind::reply && e.source < 2) return "reply events need source >= 2";
  if (e.kind == EventKind::autonomous_action && e.source != 1) {
    return "autonomous actions carry source 1";
  }
  return std::nullopt;
}

int AgentState::score_toward(const AgentId& peer) const {
  auto it = relationship.find(peer);
  return it == relationship.end() ? 0 : it->second;
}

}  // namespace bounded
