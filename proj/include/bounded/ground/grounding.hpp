#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bounded/core/catalog.hpp"
#include "bounded/core/types.hpp"
#include "bounded/ground/embedder.hpp"

namespace bounded::ground {

struct GroundingConfig {
  // Applied to all three pools unless a per-pool override is set.
  double fallback_threshold = 0.3;
  std::array<std::optional<double>, 3> pool_threshold{};
  int max_pglv = 3;
  int top_k = 3;

  double threshold_for(PoolKind pool) const {
    return pool_threshold[static_cast<std::size_t>(pool)].value_or(fallback_threshold);
  }
  // Throws Error(Errc::validation) when a field is out of range.
  void validate() const;
};

struct RankedCandidate {
  BundleId id;
  std::string name;
  int pglv = 1;
  double similarity = 0.0;
};

struct GroundingMatch {
  BehaviorBundle bundle;
  double similarity = 0.0;
  // 1-based position of `bundle` in the full filtered ranking.
  int rank = 1;
  bool fell_back = false;
  // Top-k of the ranking the decision was made on.
  std::vector<RankedCandidate> top;
};

using Candidates = std::vector<const BehaviorBundle*>;

// True when a bundle's valence tags contradict the agent's emotion.
bool contradicts(Emotion agent, const BehaviorBundle& bundle);

// Drops emotionally contradictory bundles and bundles above max_pglv. The
// pool's safe default is always kept.
Candidates filter_candidates(const std::vector<BehaviorBundle>& pool, Emotion emotion,
                             const GroundingConfig& config);

// Top min(k, |candidates|) by cosine to the intent, descending; ties broken
// by ascending bundle id.
std::vector<GroundingMatch> retrieve(std::string_view intent, const Candidates& candidates,
                                     const Embedder& embedder, int k);

// Free-text intent against the filtered to-self pool with threshold fallback.
GroundingMatch ground_self(std::string_view intent, const BundleCatalog& catalog, Emotion emotion,
                           const Embedder& embedder, const GroundingConfig& config);

// Model-selected names against the filtered talk and non-talk pools, each
// side independently with threshold fallback.
std::pair<GroundingMatch, std::optional<GroundingMatch>> ground_pair(
    std::string_view talk_name, const std::optional<std::string>& nontalk_name,
    const BundleCatalog& catalog, Emotion emotion, const Embedder& embedder,
    const GroundingConfig& config);

// Grounds one intent against one pool. ground_self and ground_pair are thin
// wrappers around this.
GroundingMatch ground_in_pool(std::string_view intent, PoolKind pool, const BundleCatalog& catalog,
                              Emotion emotion, const Embedder& embedder, const GroundingConfig& config);

}  // namespace bounded::ground
