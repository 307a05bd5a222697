#pragma once

#include "bounded/core/types.hpp"

namespace bounded {

// Player inputs (whisper, trigger, injected social) are A; replies and other
// responses are B; heartbeat-driven behaviour is C.
PriorityClass classify_priority(const Event& event);

// Source assigned to a reply that answers an event carrying `incoming_source`.
// Source 1 is reserved for autonomous actions, so replies to injected
// source-0 events start at 2.
int next_source(int incoming_source);

}  // namespace bounded
