#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bounded/converge/converge.hpp"
#include "bounded/core/json.hpp"
#include "bounded/core/types.hpp"
#include "bounded/ground/grounding.hpp"
#include "bounded/policy/policy.hpp"

namespace bounded::runtime {

struct RoomConfig {
  double alpha = 0.2;
  bool decay_enabled = true;
  // Chain halted at end of round once its max source reaches this.
  int depth_cap = 10;
  // Chain halted at end of round once it holds this many events.
  int event_ceiling = 100;
  Tick heartbeat_period = 40;
  Tick dedup_window = 60;
  double dedup_threshold = 0.9;
  ground::GroundingConfig grounding;
  double bystander_reply_prob = 0.0;
  // Probability that a heartbeat action addresses a random peer instead of
  // being self-directed.
  double autonomous_target_prob = 0.0;
  // Extra ticks a talk action keeps the lock after the round it started in.
  // 0 releases the lock at the end of the same round.
  Tick talk_duration = 0;
  std::size_t history_window = policy::kDefaultHistoryWindow;
  std::uint64_t master_seed = 0;

  converge::DecayConfig decay() const { return {alpha, decay_enabled}; }
  // Throws Error(Errc::validation).
  void validate() const;
};

Json room_config_to_json(const RoomConfig& c);
// Starts from `base` and overrides any field present in `j`.
RoomConfig room_config_from_json(const Json& j, const RoomConfig& base = {});

struct RoomState {
  std::string room_id;
  // Scenario order; also the per-round processing order.
  std::vector<AgentState> agents;
  std::vector<Event> history;
  Tick logical_clock = 0;
  std::uint64_t rng_seed = 0;
  RoomConfig config;

  AgentState* find_agent(const AgentId& id);
  const AgentState* find_agent(const AgentId& id) const;
  // Throws Error(Errc::unknown_agent).
  const AgentState& agent(const AgentId& id) const;
};

// Policy context for `acting` built from a room snapshot: agents, the last
// config.history_window events, and the active stimulus.
policy::PolicyContext build_context(const RoomState& room, const AgentId& acting,
                                    policy::ActiveStimulus stimulus, std::optional<AgentId> target,
                                    bool self_directed);

}  // namespace bounded::runtime
