#include "bounded/runtime/room.hpp"

#include <algorithm>

#include "bounded/core/errors.hpp"
#include "bounded/core/priority.hpp"
#include "bounded/ground/grounding.hpp"

namespace bounded::runtime {

namespace {

// Ended chains are kept this long for status queries, then forgotten.
constexpr Tick kChainRetention = 10'000;

ground::GroundingMatch direct_match(const BehaviorBundle& b) {
  ground::GroundingMatch m;
  m.bundle = b;
  m.similarity = 1.0;
  m.rank = 1;
  m.fell_back = false;
  m.top.push_back({b.id, b.name, b.pglv, 1.0});
  return m;
}

bool recoverable(const Error& e) {
  return e.code() == Errc::policy_failure || e.code() == Errc::embedder_failure;
}

}  // namespace

Room::Room(RoomState initial, const BundleCatalog& catalog, const ground::Embedder& embedder,
           policy::PolicyBackend& policy, TraceSink* sink)
    : state_(std::move(initial)), catalog_(catalog), embedder_(embedder), policy_(policy), sink_(sink) {
  state_.config.validate();
  if (state_.rng_seed == 0) state_.rng_seed = state_.config.master_seed;
  if (state_.agents.empty()) throw Error(Errc::validation, "room '" + state_.room_id + "' has no agents");
  for (std::size_t i = 0; i < state_.agents.size(); ++i) {
    auto& a = state_.agents[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (state_.agents[j].agent_id == a.agent_id) {
        throw Error(Errc::validation, "duplicate agent id '" + a.agent_id + "'");
      }
    }
    if (a.heartbeat_period < 1) throw Error(Errc::validation, "heartbeat_period must be >= 1");
    a.rng_seed = Rng::derive(state_.rng_seed, i);
    runtime_.push_back(Runtime{Rng(a.rng_seed), {}, std::nullopt, 0, {}, false});
  }
  for (const auto& e : state_.history) next_id_ = std::max(next_id_, e.event_id + 1);
  if (sink_ != nullptr) sink_->write(trace_header(state_));
}

std::size_t Room::index_of(const AgentId& id) const {
  for (std::size_t i = 0; i < state_.agents.size(); ++i) {
    if (state_.agents[i].agent_id == id) return i;
  }
  throw Error(Errc::unknown_agent, "unknown agent '" + id + "' in room '" + state_.room_id + "'");
}

const ChainStatus* Room::chain(EventId root) const {
  auto it = chains_.find(root);
  return it == chains_.end() ? nullptr : &it->second;
}

std::size_t Room::pending_stimuli() const {
  std::size_t n = 0;
  for (const auto& rt : runtime_) n += rt.stimuli.size();
  return n;
}

int Room::subscribe(Listener listener) {
  const int id = next_listener_++;
  listeners_.emplace(id, std::move(listener));
  return id;
}

void Room::unsubscribe(int id) { listeners_.erase(id); }

EventId Room::inject_event(Event e) {
  if (e.source != 0) contract_violation("inject_event requires source 0, got " + std::to_string(e.source));
  index_of(e.actor);
  if (!e.target) throw Error(Errc::validation, "injected social event needs a target");
  index_of(*e.target);
  if (*e.target == e.actor) throw Error(Errc::validation, "injected social event targets its own actor");
  if (!e.bundle_pair) throw Error(Errc::validation, "injected social event needs a bundle pair");
  const auto* talk = catalog_.find(e.bundle_pair->talk);
  if (talk == nullptr || talk->pool != PoolKind::talk) {
    throw Error(Errc::unknown_bundle, "unknown talk bundle '" + e.bundle_pair->talk + "'");
  }
  if (e.bundle_pair->nontalk) {
    const auto* nt = catalog_.find(*e.bundle_pair->nontalk);
    if (nt == nullptr || nt->pool != PoolKind::non_talk) {
      throw Error(Errc::unknown_bundle, "unknown non-talk bundle '" + *e.bundle_pair->nontalk + "'");
    }
  }
  e.kind = EventKind::injected_social;
  Input in{Input::Kind::inject, next_id_++, std::move(e), {}, {}};
  inputs_.push_back(std::move(in));
  return inputs_.back().id;
}

EventId Room::submit_whisper(whisper::Whisper w) {
  whisper::validate_whisper(w, state_);
  w.logical_time = state_.logical_clock;
  Input in{Input::Kind::whisper, next_id_++, {}, std::move(w), {}};
  inputs_.push_back(std::move(in));
  return inputs_.back().id;
}

EventId Room::submit_trigger(Trigger t) {
  const auto& agent = state_.agent(t.agent_id);
  if (!agent.owner || *agent.owner != t.player_id) {
    throw Error(Errc::ownership, "player '" + t.player_id + "' does not own agent '" + t.agent_id + "'");
  }
  const auto* b = catalog_.find(t.bundle_id);
  if (b == nullptr) throw Error(Errc::unknown_bundle, "unknown bundle '" + t.bundle_id + "'");
  if (b->pglv > state_.config.grounding.max_pglv) {
    throw Error(Errc::validation, "bundle '" + t.bundle_id + "' exceeds the room's max_pglv");
  }
  if (b->pool == PoolKind::to_self) {
    t.target_id.reset();
  } else {
    if (!t.target_id) throw Error(Errc::validation, "bundle '" + t.bundle_id + "' needs a target");
    state_.agent(*t.target_id);
    if (*t.target_id == t.agent_id) throw Error(Errc::validation, "trigger targets its own agent");
  }
  Input in{Input::Kind::trigger, next_id_++, {}, {}, std::move(t)};
  inputs_.push_back(std::move(in));
  return inputs_.back().id;
}

std::vector<Event> Room::advance_round() {
  std::vector<Event> out;
  auto inputs = std::move(inputs_);
  inputs_.clear();
  for (auto& in : inputs) deliver_input(in, out);
  for (std::size_t i = 0; i < state_.agents.size(); ++i) process_stimuli(i, out);
  for (std::size_t i = 0; i < state_.agents.size(); ++i) process_heartbeat(i, out);
  end_of_round();
  return out;
}

std::pair<converge::LockDecision, std::optional<EventId>> Room::lock_for_input(std::size_t index) {
  auto& agent = state_.agents[index];
  auto& rt = runtime_[index];
  Event probe;
  probe.source = 0;
  probe.kind = EventKind::whisper;
  const auto decision = converge::try_acquire_talk_lock(agent, probe);
  std::optional<EventId> interrupted;
  if (decision == converge::LockDecision::interrupt) interrupted = rt.inflight;
  return {decision, interrupted};
}

void Room::write_decision(DecisionRecord r) {
  if (sink_ != nullptr) sink_->write(to_json(r));
}

void Room::policy_failed(std::size_t index, const Error& e, std::optional<EventId> stimulus) {
  auto& agent = state_.agents[index];
  converge::release_talk_lock(agent);
  runtime_[index].inflight.reset();
  std::string detail = e.what();
  if (e.policy_kind() != PolicyFailureKind::none) {
    detail = std::string(to_string(e.policy_kind())) + ": " + detail;
  }
  write_decision({state_.logical_clock, agent.agent_id, "policy_failure", stimulus, std::nullopt, detail});
}

void Room::deliver_input(Input& in, std::vector<Event>& out) {
  const AgentId actor = in.kind == Input::Kind::inject    ? in.event.actor
                        : in.kind == Input::Kind::whisper ? in.whisper.agent_id
                                                          : in.trigger.agent_id;
  const auto index = index_of(actor);
  const auto& agent = state_.agents[index];
  auto [decision, interrupted] = lock_for_input(index);

  whisper::PlannedBehavior plan;
  plan.priority = PriorityClass::A;
  plan.source = 0;
  Emission em;
  em.reserved_id = in.id;
  em.lock = decision;

  try {
    switch (in.kind) {
      case Input::Kind::inject: {
        const auto* talk = catalog_.find(in.event.bundle_pair->talk);
        plan.talk = direct_match(*talk);
        if (in.event.bundle_pair->nontalk) plan.nontalk = direct_match(*catalog_.find(*in.event.bundle_pair->nontalk));
        plan.target = in.event.target;
        em.kind = EventKind::injected_social;
        em.stimulus = policy::ActiveStimulus{policy::StimulusKind::trigger, PriorityClass::A, talk->name, std::nullopt};
        break;
      }
      case Input::Kind::trigger: {
        const auto* b = catalog_.find(in.trigger.bundle_id);
        if (b->pool == PoolKind::to_self) {
          plan.self = direct_match(*b);
        } else if (b->pool == PoolKind::talk) {
          plan.talk = direct_match(*b);
          plan.target = in.trigger.target_id;
        } else {
          // A bare non-talk trigger is paired with the talk safe default so
          // the pair still has a dialogue slot.
          plan.talk = direct_match(catalog_.safe_default(PoolKind::talk));
          plan.nontalk = direct_match(*b);
          plan.target = in.trigger.target_id;
        }
        em.kind = EventKind::trigger;
        em.stimulus = policy::ActiveStimulus{policy::StimulusKind::trigger, PriorityClass::A, b->name, std::nullopt};
        break;
      }
      case Input::Kind::whisper: {
        const auto& w = in.whisper;
        if (whisper::route_whisper(w) == whisper::WhisperRoute::to_other) {
          plan = whisper::whisper_to_other(w, state_, policy_, embedder_, catalog_, state_.config.grounding);
        } else {
          plan = whisper::whisper_to_self(w, state_, embedder_, catalog_, state_.config.grounding);
        }
        em.kind = EventKind::whisper;
        em.whisper_text = w.text;
        em.stimulus = policy::ActiveStimulus{policy::StimulusKind::whisper, PriorityClass::A, w.text, std::nullopt};
        break;
      }
    }
  } catch (const Error& e) {
    if (!recoverable(e)) throw;
    policy_failed(index, e, in.id);
    return;
  }
  (void)agent;
  execute(index, plan, std::move(em), interrupted, out);
}

void Room::process_stimuli(std::size_t index, std::vector<Event>& out) {
  auto& agent = state_.agents[index];
  auto& rt = runtime_[index];
  if (rt.acted || rt.stimuli.empty()) return;

  std::vector<converge::StimulusCandidate> candidates;
  std::vector<EventId> ids;
  for (const auto& e : rt.stimuli) {
    candidates.push_back({e, agent.score_toward(e.actor)});
    ids.push_back(e.event_id);
  }
  const Event stimulus = converge::select_reply_stimulus(agent, candidates, rt.rng).event;
  for (const auto& e : rt.stimuli) {
    if (e.event_id != stimulus.event_id) note_chain(e.chain_root, false);
  }
  rt.stimuli.clear();

  Event probe;
  probe.source = next_source(stimulus.source);
  probe.kind = EventKind::reply;
  const auto lock = converge::try_acquire_talk_lock(agent, probe);
  if (lock == converge::LockDecision::rejected) {
    write_decision({state_.logical_clock, agent.agent_id, "lock_rejected", stimulus.event_id, std::nullopt,
                    "talk lock held"});
    note_chain(stimulus.chain_root, false);
    return;
  }

  const auto draw = converge::draw_continuation(stimulus.source, state_.config.decay(), rt.rng);
  const DecayNote note{stimulus.source, draw.probability, draw.draw, draw.continued};
  if (!draw.continued) {
    converge::release_talk_lock(agent);
    write_decision({state_.logical_clock, agent.agent_id, "continuation_failed", stimulus.event_id, note, ""});
    note_chain(stimulus.chain_root, true);
    return;
  }

  std::string text;
  if (stimulus.bundle_pair) {
    if (const auto* b = catalog_.find(stimulus.bundle_pair->talk)) text = b->name;
  } else if (stimulus.self_bundle) {
    if (const auto* b = catalog_.find(*stimulus.self_bundle)) text = b->name;
  }
  policy::ActiveStimulus active{policy::StimulusKind::event, PriorityClass::B, text, stimulus};

  whisper::PlannedBehavior plan;
  try {
    auto ctx = build_context(state_, agent.agent_id, active, stimulus.actor, false);
    auto proposal = policy_.propose(ctx);
    auto [talk, nontalk] = ground::ground_pair(proposal.talk_name, proposal.nontalk_name, catalog_, agent.emotion,
                                               embedder_, state_.config.grounding);
    plan.talk = std::move(talk);
    plan.nontalk = std::move(nontalk);
    plan.proposal = std::move(proposal);
    if (plan.talk->bundle.pool == PoolKind::talk) plan.dialogue_request = whisper::DialogueRequest{std::move(ctx), std::nullopt};
  } catch (const Error& e) {
    if (!recoverable(e)) throw;
    policy_failed(index, e, stimulus.event_id);
    note_chain(stimulus.chain_root, false);
    return;
  }
  plan.target = stimulus.actor;
  plan.priority = PriorityClass::B;
  plan.source = probe.source;

  Emission em;
  em.kind = EventKind::reply;
  em.reply_to = stimulus.event_id;
  em.chain_root = stimulus.chain_root;
  em.decay = note;
  em.lock = lock;
  em.candidates = std::move(ids);
  em.stimulus = std::move(active);
  execute(index, plan, std::move(em), std::nullopt, out);
}

void Room::process_heartbeat(std::size_t index, std::vector<Event>& out) {
  auto& agent = state_.agents[index];
  auto& rt = runtime_[index];
  if (agent.next_heartbeat > state_.logical_clock) return;
  // Deferred, not skipped: the heartbeat stays due until the agent is free.
  if (rt.acted || agent.talk_locked() || !rt.stimuli.empty()) return;
  agent.next_heartbeat = state_.logical_clock + agent.heartbeat_period;

  std::optional<AgentId> peer;
  const auto n = state_.agents.size();
  if (state_.config.autonomous_target_prob > 0.0 && n > 1 && rt.rng.bernoulli(state_.config.autonomous_target_prob)) {
    auto j = rt.rng.below(n - 1);
    if (j >= index) ++j;
    peer = state_.agents[j].agent_id;
  }

  whisper::PlannedBehavior plan;
  plan.priority = PriorityClass::C;
  plan.source = 1;
  Emission em;
  policy::ActiveStimulus active{policy::StimulusKind::heartbeat, PriorityClass::C, "heartbeat", std::nullopt};
  try {
    if (peer) {
      Event probe;
      probe.source = 1;
      probe.kind = EventKind::autonomous_action;
      em.lock = converge::try_acquire_talk_lock(agent, probe);
      auto ctx = build_context(state_, agent.agent_id, active, peer, false);
      auto proposal = policy_.propose(ctx);
      auto [talk, nontalk] = ground::ground_pair(proposal.talk_name, proposal.nontalk_name, catalog_,
                                                 agent.emotion, embedder_, state_.config.grounding);
      plan.talk = std::move(talk);
      plan.nontalk = std::move(nontalk);
      plan.proposal = std::move(proposal);
      plan.target = peer;
      if (plan.talk->bundle.pool == PoolKind::talk) plan.dialogue_request = whisper::DialogueRequest{std::move(ctx), std::nullopt};
      em.kind = EventKind::autonomous_action;
    } else {
      auto ctx = build_context(state_, agent.agent_id, active, std::nullopt, true);
      auto proposal = policy_.propose(ctx);
      const std::string intent = proposal.self_intent.value_or(proposal.talk_name);
      plan.self = ground::ground_self(intent, catalog_, agent.emotion, embedder_, state_.config.grounding);
      plan.proposal = std::move(proposal);
      em.kind = EventKind::self_action;
    }
  } catch (const Error& e) {
    if (!recoverable(e)) throw;
    policy_failed(index, e, std::nullopt);
    return;
  }
  em.stimulus = std::move(active);
  execute(index, plan, std::move(em), std::nullopt, out);
}

Event Room::execute(std::size_t index, const whisper::PlannedBehavior& plan, Emission em,
                    std::optional<EventId> supersedes, std::vector<Event>& out) {
  auto& agent = state_.agents[index];
  auto& rt = runtime_[index];
  const Tick now = state_.logical_clock;

  Event e;
  e.event_id = em.reserved_id.value_or(next_id_);
  if (!em.reserved_id) ++next_id_;
  e.logical_time = now;
  e.actor = agent.agent_id;
  e.target = plan.target;
  e.source = plan.source;
  e.kind = (plan.source != 0 && plan.fell_back()) ? EventKind::fallback : em.kind;
  e.whisper_text = em.whisper_text;
  e.reply_to = em.reply_to;
  e.chain_root = em.chain_root.value_or(e.event_id);

  TraceRecord rec;
  rec.priority = plan.priority;
  rec.decay = em.decay;
  rec.lock = em.lock;
  rec.supersedes = supersedes;
  rec.policy_backend = plan.proposal ? policy_.id() : "direct";
  rec.proposal = plan.proposal;
  rec.candidates = std::move(em.candidates);

  if (plan.is_self()) {
    e.self_bundle = plan.self->bundle.id;
    rec.grounding.push_back({PoolKind::to_self, *plan.self});
  } else {
    e.bundle_pair = BundlePair{plan.talk->bundle.id, std::nullopt};
    rec.grounding.push_back({plan.talk->bundle.pool, *plan.talk});
    if (plan.nontalk) {
      e.bundle_pair->nontalk = plan.nontalk->bundle.id;
      rec.grounding.push_back({PoolKind::non_talk, *plan.nontalk});
    }

    if (plan.talk->bundle.pool == PoolKind::talk) {
      policy::PolicyContext ctx = plan.dialogue_request
                                      ? plan.dialogue_request->context
                                      : build_context(state_, agent.agent_id,
                                                      em.stimulus.value_or(policy::ActiveStimulus{}), plan.target, false);
      policy::DialoguePair pair{plan.talk->bundle, std::nullopt};
      if (plan.nontalk) pair.nontalk = plan.nontalk->bundle;
      const auto& cfg = state_.config;
      policy::DedupGate gate{&rt.recent, now, cfg.dedup_window, &embedder_, cfg.dedup_threshold};
      policy::DialogueOutcome outcome;
      try {
        outcome = policy::generate_dialogue(policy_, ctx, pair, gate);
      } catch (const Error& err) {
        if (!recoverable(err)) throw;
        outcome = {std::nullopt, policy::DialogueStatus::suppressed};
      }
      rec.dialogue_status = outcome.status;
      if (outcome.text) {
        rt.recent.push_back({*outcome.text, now});
        e.dialogue = std::move(outcome.text);
      }
      std::erase_if(rt.recent, [&](const converge::Utterance& u) { return u.time < now - cfg.dedup_window; });
    }
  }

  if (e.target && *e.target != e.actor) {
    auto apply = [&](const std::optional<ground::GroundingMatch>& m) {
      if (!m || m->bundle.relationship_delta == 0) return;
      agent.relationship[*e.target] += m->bundle.relationship_delta;
      rec.relationship_updates.push_back({agent.agent_id, *e.target, m->bundle.relationship_delta});
    };
    apply(plan.talk);
    apply(plan.nontalk);
  }

  if (supersedes) {
    for (auto& h : state_.history) {
      if (h.event_id == *supersedes) h.superseded = true;
    }
  }

  if (auto violation = check_event_invariants(e)) contract_violation("emitted event " + std::to_string(e.event_id) + ": " + *violation);

  if (e.target) {
    auto& chain = chains_[e.chain_root];
    chain.root = e.chain_root;
    chain.events += 1;
    chain.max_source = std::max(chain.max_source, e.source);
  }

  state_.history.push_back(e);
  rec.event = e;
  if (sink_ != nullptr) sink_->write(to_json(rec));

  if (agent.talk_locked()) {
    rt.inflight = e.event_id;
    rt.lock_until = plan.is_self() ? now : now + state_.config.talk_duration;
  }
  rt.acted = true;

  if (e.target && *e.target != e.actor) {
    const auto target = index_of(*e.target);
    runtime_[target].stimuli.push_back(e);
    const double p = state_.config.bystander_reply_prob;
    if (p > 0.0) {
      for (std::size_t j = 0; j < runtime_.size(); ++j) {
        if (j == index || j == target) continue;
        if (runtime_[j].rng.bernoulli(p)) runtime_[j].stimuli.push_back(e);
      }
    }
  }

  out.push_back(e);
  for (const auto& [id, listener] : listeners_) listener(e);
  return e;
}

void Room::note_chain(EventId root, bool failed_draw) {
  auto it = chains_.find(root);
  if (it == chains_.end()) return;
  if (failed_draw) {
    ++it->second.failed_draws;
  } else {
    ++it->second.dropped;
  }
}

void Room::end_of_round() {
  const Tick now = state_.logical_clock;
  for (std::size_t i = 0; i < runtime_.size(); ++i) {
    auto& rt = runtime_[i];
    auto& agent = state_.agents[i];
    if (agent.talk_locked() && rt.lock_until <= now) {
      converge::release_talk_lock(agent);
      rt.inflight.reset();
    }
    rt.acted = false;
  }

  for (auto& [root, chain] : chains_) {
    if (chain.open()) chain.pending = 0;
  }
  for (const auto& rt : runtime_) {
    for (const auto& s : rt.stimuli) {
      auto it = chains_.find(s.chain_root);
      if (it != chains_.end() && it->second.open()) ++it->second.pending;
    }
  }

  for (auto& [root, chain] : chains_) {
    if (!chain.open()) continue;
    std::optional<HaltReason> reason;
    if (chain.max_source >= state_.config.depth_cap) {
      reason = HaltReason::depth_cap;
    } else if (chain.events >= state_.config.event_ceiling) {
      reason = HaltReason::event_ceiling;
    }
    if (reason) {
      int dropped = 0;
      for (auto& rt : runtime_) {
        dropped += static_cast<int>(std::erase_if(rt.stimuli, [&](const Event& s) { return s.chain_root == root; }));
      }
      chain.halted = reason;
      chain.ended_at = now;
      chain.pending = 0;
      if (sink_ != nullptr) {
        sink_->write(to_json(HaltRecord{now, root, *reason, chain.max_source, chain.events, dropped}));
      }
    } else if (chain.pending == 0) {
      chain.ended_at = now;
    }
  }
  std::erase_if(chains_, [&](const auto& kv) {
    return kv.second.ended_at && *kv.second.ended_at < now - kChainRetention;
  });

  state_.logical_clock = now + 1;
  if (sink_ != nullptr) {
    sink_->write(Json{{"type", "round"}, {"clock", state_.logical_clock}});
    sink_->flush();
  }
}

}  // namespace bounded::runtime
