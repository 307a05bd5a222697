#include "bounded/converge/converge.hpp"

#include <algorithm>
#include <optional>

#include "bounded/core/errors.hpp"

namespace bounded::converge {

double reply_probability(int source, const DecayConfig& config) {
  if (source < 0) contract_violation("reply_probability: negative source");
  if (!config.enabled) return 1.0;
  const double p = 1.0 - static_cast<double>(source - 1) * config.alpha;
  return std::clamp(p, 0.0, 1.0);
}

ContinuationDraw draw_continuation(int source, const DecayConfig& config, Rng& rng) {
  ContinuationDraw out;
  out.probability = reply_probability(source, config);
  out.draw = rng.uniform();
  out.continued = out.draw < out.probability;
  return out;
}

const StimulusCandidate& select_reply_stimulus(const AgentState& agent,
                                               const std::vector<StimulusCandidate>& candidates,
                                               Rng& rng) {
  if (candidates.empty()) {
    throw Error(Errc::empty_candidates, "agent '" + agent.agent_id + "' has no reply candidates");
  }
  int best = candidates.front().relationship_score;
  for (const auto& c : candidates) best = std::max(best, c.relationship_score);

  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].relationship_score == best) tied.push_back(i);
  }
  if (tied.size() == 1) return candidates[tied.front()];
  return candidates[tied[rng.below(tied.size())]];
}

std::string_view to_string(LockDecision d) {
  switch (d) {
    case LockDecision::accepted: return "accepted";
    case LockDecision::interrupt: return "interrupt";
    case LockDecision::rejected: return "rejected";
  }
  return "?";
}

LockDecision try_acquire_talk_lock(AgentState& agent, const Event& event) {
  if (!agent.talk_locked()) {
    agent.talk_state |= kTalkExecuting;
    return LockDecision::accepted;
  }
  if (event.source == 0) return LockDecision::interrupt;
  return LockDecision::rejected;
}

void release_talk_lock(AgentState& agent) { agent.talk_state &= ~kTalkExecuting; }

bool is_duplicate_dialogue(std::string_view text, const std::vector<Utterance>& recent, Tick now,
                           Tick window, const ground::Embedder& embedder, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) contract_violation("dedup threshold outside [0,1]");
  std::optional<ground::Vector> query;
  for (const auto& u : recent) {
    if (u.time < now - window || u.time > now) continue;
    if (u.text == text) return true;
    if (!query) query = embedder.embed(text);
    const auto v = embedder.embed(u.text);
    if (ground::cosine(*query, v) >= threshold) return true;
  }
  return false;
}

}  // namespace bounded::converge
