#pragma once

// JSON codecs for the core value types. Field names here are the stable
// on-disk names used by catalog, trace, scenario and wire formats.

#include <json.hpp>

#include "bounded/core/types.hpp"

namespace bounded {

using Json = nlohmann::json;

Json bundle_to_json(const BehaviorBundle& b);
BehaviorBundle bundle_from_json(const Json& j);

Json event_to_json(const Event& e);
Event event_from_json(const Json& j);

Json agent_to_json(const AgentState& a);
AgentState agent_from_json(const Json& j);

}  // namespace bounded
