#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bounded/core/rng.hpp"
#include "bounded/core/types.hpp"
#include "bounded/ground/embedder.hpp"

namespace bounded::converge {

struct DecayConfig {
  double alpha = 0.2;
  bool enabled = true;
};

// max(0, 1 - (source - 1) * alpha), additionally clamped to 1 so that
// source 0 is a valid probability. Always 1 when decay is disabled.
double reply_probability(int source, const DecayConfig& config);

struct ContinuationDraw {
  double probability = 1.0;
  double draw = 0.0;
  bool continued = true;
};

// Consumes exactly one draw from rng.
ContinuationDraw draw_continuation(int source, const DecayConfig& config, Rng& rng);

inline bool sample_continuation(int source, const DecayConfig& config, Rng& rng) {
  return draw_continuation(source, config, rng).continued;
}

struct StimulusCandidate {
  Event event;
  int relationship_score = 0;
};

// Candidate whose actor the receiving agent scores highest. Ties are broken
// by one uniform draw over the tied set, in input order; no draw is consumed
// when there is a unique maximum.
const StimulusCandidate& select_reply_stimulus(const AgentState& agent,
                                               const std::vector<StimulusCandidate>& candidates,
                                               Rng& rng);

enum class LockDecision { accepted, interrupt, rejected };

std::string_view to_string(LockDecision d);

// Bit 0 of talk_state guards an in-flight talk action. Source-0 input is the
// only stimulus that may take the lock while it is held (returned as
// `interrupt`); anything else is rejected with the agent left unchanged.
LockDecision try_acquire_talk_lock(AgentState& agent, const Event& event);

void release_talk_lock(AgentState& agent);

struct Utterance {
  std::string text;
  Tick time = 0;
};

// True iff some utterance with time in [now - window, now] equals `text` or
// has cosine >= threshold with it.
bool is_duplicate_dialogue(std::string_view text, const std::vector<Utterance>& recent, Tick now,
                           Tick window, const ground::Embedder& embedder, double threshold);

}  // namespace bounded::converge
