#include "bounded/core/priority.hpp"

#include "bounded/core/errors.hpp"

namespace bounded {

PriorityClass classify_priority(const Event& event) {
  switch (event.kind) {
    case EventKind::whisper:
    case EventKind::trigger:
    case EventKind::injected_social:
      return PriorityClass::A;
    case EventKind::autonomous_action:
    case EventKind::self_action:
      return PriorityClass::C;
    case EventKind::reply:
      return PriorityClass::B;
    case EventKind::fallback:
      // A fallback keeps the priority of the behaviour it replaced.
      return event.source == 1 ? PriorityClass::C : PriorityClass::B;
  }
  return PriorityClass::B;
}

int next_source(int incoming_source) {
  if (incoming_source < 0) {
    contract_violation("next_source: negative source " + std::to_string(incoming_source));
  }
  return incoming_source == 0 ? 2 : incoming_source + 1;
}

}  // namespace bounded
