#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bounded/converge/converge.hpp"
#include "bounded/core/catalog.hpp"
#include "bounded/core/errors.hpp"
#include "bounded/core/rng.hpp"
#include "bounded/core/types.hpp"
#include "bounded/ground/embedder.hpp"
#include "bounded/policy/policy.hpp"
#include "bounded/runtime/room_state.hpp"
#include "bounded/runtime/trace.hpp"
#include "bounded/whisper/whisper.hpp"

namespace bounded::runtime {

// A player invoking a named bundle directly.
struct Trigger {
  PlayerId player_id;
  AgentId agent_id;
  BundleId bundle_id;
  std::optional<AgentId> target_id;
};

struct ChainStatus {
  EventId root = 0;
  int max_source = 0;
  int events = 0;
  // Undelivered stimuli belonging to the chain, recounted at end of round.
  int pending = 0;
  std::optional<HaltReason> halted;
  // Stimuli of this chain that ended in a failed continuation draw, and
  // those dropped for any other reason (lock held, policy failure, losing
  // arbitration).
  int failed_draws = 0;
  int dropped = 0;
  // Round in which the chain ended, either naturally or by a bound.
  std::optional<Tick> ended_at;

  bool open() const { return !ended_at.has_value(); }
  // Ended with no pending stimuli before any bound fired.
  bool natural() const { return ended_at && !halted; }
};

// One room's engine. Not thread-safe: all calls must come from the room's
// owning thread.
class Room {
 public:
  Room(RoomState initial, const BundleCatalog& catalog, const ground::Embedder& embedder,
       policy::PolicyBackend& policy, TraceSink* sink = nullptr);

  Room(const Room&) = delete;
  Room& operator=(const Room&) = delete;

  // Queues a source-0 social event authored outside the engine. The event is
  // delivered at the start of the next round. Returns the reserved event id.
  // Throws Error(contract_violation) for source != 0 and Error(unknown_agent).
  EventId inject_event(Event e);
  // Throws Error(validation | empty_intent | unknown_agent | ownership).
  EventId submit_whisper(whisper::Whisper w);
  // Throws Error(unknown_bundle | unknown_agent | validation | ownership).
  EventId submit_trigger(Trigger t);

  // Runs one logical tick and returns the events emitted in it, in emission
  // order.
  std::vector<Event> advance_round();

  const RoomState& state() const { return state_; }
  Tick now() const { return state_.logical_clock; }
  const BundleCatalog& catalog() const { return catalog_; }
  const std::map<EventId, ChainStatus>& chains() const { return chains_; }
  const ChainStatus* chain(EventId root) const;
  std::size_t pending_inputs() const { return inputs_.size(); }
  std::size_t pending_stimuli() const;

  using Listener = std::function<void(const Event&)>;
  int subscribe(Listener listener);
  void unsubscribe(int id);

 private:
  struct Input {
    enum class Kind { inject, whisper, trigger } kind;
    EventId id = 0;
    Event event;
    whisper::Whisper whisper;
    Trigger trigger;
  };

  struct Runtime {
    Rng rng;
    std::vector<Event> stimuli;
    std::optional<EventId> inflight;
    Tick lock_until = 0;
    std::vector<converge::Utterance> recent;
    bool acted = false;
  };

  // What the caller knows about an event beyond its plan.
  struct Emission {
    EventKind kind = EventKind::reply;
    std::optional<EventId> reserved_id;
    std::optional<EventId> reply_to;
    std::optional<EventId> chain_root;
    std::optional<std::string> whisper_text;
    std::optional<DecayNote> decay;
    std::optional<converge::LockDecision> lock;
    std::vector<EventId> candidates;
    std::optional<policy::ActiveStimulus> stimulus;
  };

  void deliver_input(Input& in, std::vector<Event>& out);
  void process_stimuli(std::size_t index, std::vector<Event>& out);
  void process_heartbeat(std::size_t index, std::vector<Event>& out);
  void end_of_round();
  void note_chain(EventId root, bool failed_draw);

  // Takes the talk lock for a source-0 action; returns the event it
  // interrupted, if any.
  std::pair<converge::LockDecision, std::optional<EventId>> lock_for_input(std::size_t index);

  Event execute(std::size_t index, const whisper::PlannedBehavior& plan, Emission emission,
                std::optional<EventId> supersedes, std::vector<Event>& out);

  std::size_t index_of(const AgentId& id) const;
  void write_decision(DecisionRecord r);
  void policy_failed(std::size_t index, const Error& e, std::optional<EventId> stimulus);

  RoomState state_;
  const BundleCatalog& catalog_;
  const ground::Embedder& embedder_;
  policy::PolicyBackend& policy_;
  TraceSink* sink_;

  std::vector<Runtime> runtime_;
  std::vector<Input> inputs_;
  std::map<EventId, ChainStatus> chains_;
  EventId next_id_ = 1;
  std::map<int, Listener> listeners_;
  int next_listener_ = 1;
};

}  // namespace bounded::runtime
