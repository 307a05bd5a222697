#include "bounded/runtime/room_state.hpp"

#include <algorithm>

#include "bounded/core/errors.hpp"

namespace bounded::runtime {

void RoomConfig::validate() const {
  if (alpha < 0.0) throw Error(Errc::validation, "alpha must be >= 0");
  if (depth_cap < 1) throw Error(Errc::validation, "depth_cap must be >= 1");
  if (event_ceiling < 1) throw Error(Errc::validation, "event_ceiling must be >= 1");
  if (heartbeat_period < 1) throw Error(Errc::validation, "heartbeat_period must be >= 1");
  if (dedup_window < 0) throw Error(Errc::validation, "dedup_window must be >= 0");
  if (dedup_threshold < 0.0 || dedup_threshold > 1.0) {
    throw Error(Errc::validation, "dedup_threshold outside [0,1]");
  }
  if (bystander_reply_prob < 0.0 || bystander_reply_prob > 1.0) {
    throw Error(Errc::validation, "bystander_reply_prob outside [0,1]");
  }
  if (autonomous_target_prob < 0.0 || autonomous_target_prob > 1.0) {
    throw Error(Errc::validation, "autonomous_target_prob outside [0,1]");
  }
  if (talk_duration < 0) throw Error(Errc::validation, "talk_duration must be >= 0");
  grounding.validate();
}

Json room_config_to_json(const RoomConfig& c) {
  Json thresholds = Json::object();
  for (PoolKind p : {PoolKind::talk, PoolKind::non_talk, PoolKind::to_self}) {
    if (auto t = c.grounding.pool_threshold[static_cast<std::size_t>(p)]) {
      thresholds[std::string(to_string(p))] = *t;
    }
  }
  return {{"alpha", c.alpha},
          {"decay_enabled", c.decay_enabled},
          {"depth_cap", c.depth_cap},
          {"event_ceiling", c.event_ceiling},
          {"heartbeat_period", c.heartbeat_period},
          {"dedup_window", c.dedup_window},
          {"dedup_threshold", c.dedup_threshold},
          {"grounding",
           {{"fallback_threshold", c.grounding.fallback_threshold},
            {"pool_thresholds", thresholds},
            {"max_pglv", c.grounding.max_pglv},
            {"top_k", c.grounding.top_k}}},
          {"bystander_reply_prob", c.bystander_reply_prob},
          {"autonomous_target_prob", c.autonomous_target_prob},
          {"talk_duration", c.talk_duration},
          {"history_window", c.history_window},
          {"master_seed", c.master_seed}};
}

RoomConfig room_config_from_json(const Json& j, const RoomConfig& base) {
  RoomConfig c = base;
  if (!j.is_object()) throw Error(Errc::parse, "room config must be an object");
  try {
    c.alpha = j.value("alpha", c.alpha);
    c.decay_enabled = j.value("decay_enabled", c.decay_enabled);
    c.depth_cap = j.value("depth_cap", c.depth_cap);
    c.event_ceiling = j.value("event_ceiling", c.event_ceiling);
    c.heartbeat_period = j.value("heartbeat_period", c.heartbeat_period);
    c.dedup_window = j.value("dedup_window", c.dedup_window);
    c.dedup_threshold = j.value("dedup_threshold", c.dedup_threshold);
    c.bystander_reply_prob = j.value("bystander_reply_prob", c.bystander_reply_prob);
    c.autonomous_target_prob = j.value("autonomous_target_prob", c.autonomous_target_prob);
    c.talk_duration = j.value("talk_duration", c.talk_duration);
    c.history_window = j.value("history_window", c.history_window);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("grounding")) {
      const auto& g = j.at("grounding");
      c.grounding.fallback_threshold = g.value("fallback_threshold", c.grounding.fallback_threshold);
      c.grounding.max_pglv = g.value("max_pglv", c.grounding.max_pglv);
      c.grounding.top_k = g.value("top_k", c.grounding.top_k);
      if (g.contains("pool_thresholds")) {
        for (const auto& [name, value] : g.at("pool_thresholds").items()) {
          auto pool = parse_pool(name);
          if (!pool) throw Error(Errc::unknown_pool, "unknown pool '" + name + "' in pool_thresholds");
          c.grounding.pool_threshold[static_cast<std::size_t>(*pool)] = value.get<double>();
        }
      }
    }
  } catch (const Json::exception& e) {
    throw Error(Errc::parse, std::string("room config: ") + e.what());
  }
  return c;
}

AgentState* RoomState::find_agent(const AgentId& id) {
  auto it = std::find_if(agents.begin(), agents.end(), [&](const AgentState& a) { return a.agent_id == id; });
  return it == agents.end() ? nullptr : &*it;
}

const AgentState* RoomState::find_agent(const AgentId& id) const {
  auto it = std::find_if(agents.begin(), agents.end(), [&](const AgentState& a) { return a.agent_id == id; });
  return it == agents.end() ? nullptr : &*it;
}

const AgentState& RoomState::agent(const AgentId& id) const {
  const auto* a = find_agent(id);
  if (a == nullptr) throw Error(Errc::unknown_agent, "unknown agent '" + id + "' in room '" + room_id + "'");
  return *a;
}

policy::PolicyContext build_context(const RoomState& room, const AgentId& acting,
                                    policy::ActiveStimulus stimulus, std::optional<AgentId> target,
                                    bool self_directed) {
  policy::PolicyContext ctx;
  ctx.room_id = room.room_id;
  ctx.now = room.logical_clock;
  ctx.agents.reserve(room.agents.size());
  for (const auto& a : room.agents) {
    ctx.agents.push_back({a.agent_id, a.display_name, a.emotion, a.relationship});
  }
  const auto n = std::min(room.history.size(), room.config.history_window);
  ctx.history.assign(room.history.end() - static_cast<std::ptrdiff_t>(n), room.history.end());
  ctx.stimulus = std::move(stimulus);
  ctx.acting_agent = acting;
  ctx.target = std::move(target);
  ctx.persona = room.agent(acting).persona;
  ctx.self_directed = self_directed;
  return ctx;
}

}  // namespace bounded::runtime
