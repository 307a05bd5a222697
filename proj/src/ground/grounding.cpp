#include "bounded/ground/grounding.hpp"

#include <algorithm>

#include "bounded/core/errors.hpp"

namespace bounded::ground {

namespace {

struct Scored {
  const BehaviorBundle* bundle;
  double similarity;
};

bool ranks_before(const Scored& a, const Scored& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.bundle->id < b.bundle->id;
}

std::vector<Scored> rank_all(std::string_view intent, const Candidates& candidates,
                             const Embedder& embedder) {
  const Vector query = embedder.embed(intent);
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  for (const auto* b : candidates) {
    const Vector v = embedder.embed(b->name);
    scored.push_back({b, cosine(query, v)});
  }
  std::sort(scored.begin(), scored.end(), ranks_before);
  return scored;
}

RankedCandidate to_ranked(const Scored& s) {
  return {s.bundle->id, s.bundle->name, s.bundle->pglv, s.similarity};
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

}  // namespace

void GroundingConfig::validate() const {
  auto in_unit = [](double t) { return t >= 0.0 && t <= 1.0; };
  if (!in_unit(fallback_threshold)) throw Error(Errc::validation, "fallback_threshold outside [0,1]");
  for (const auto& t : pool_threshold) {
    if (t && !in_unit(*t)) throw Error(Errc::validation, "pool threshold outside [0,1]");
  }
  if (max_pglv < 1 || max_pglv > 3) throw Error(Errc::validation, "max_pglv outside 1..3");
  if (top_k < 1) throw Error(Errc::validation, "top_k must be at least 1");
}

bool contradicts(Emotion agent, const BehaviorBundle& bundle) {
  const auto& tags = bundle.emotion_valence;
  switch (agent) {
    case Emotion::happy:
      return tags.count(Emotion::sad) > 0 || tags.count(Emotion::angry) > 0;
    case Emotion::sad:
    case Emotion::angry:
      return tags.count(Emotion::happy) > 0;
    case Emotion::neutral:
      return false;
  }
  return false;
}

Candidates filter_candidates(const std::vector<BehaviorBundle>& pool, Emotion emotion,
                             const GroundingConfig& config) {
  Candidates out;
  out.reserve(pool.size());
  for (const auto& b : pool) {
    if (b.is_safe_default || (b.pglv <= config.max_pglv && !contradicts(emotion, b))) {
      out.push_back(&b);
    }
  }
  return out;
}

std::vector<GroundingMatch> retrieve(std::string_view intent, const Candidates& candidates,
                                     const Embedder& embedder, int k) {
  if (candidates.empty()) throw Error(Errc::empty_candidates, "retrieve over an empty candidate list");
  if (k < 1) contract_violation("retrieve: k must be at least 1");
  const auto scored = rank_all(intent, candidates, embedder);
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());

  std::vector<RankedCandidate> top;
  top.reserve(n);
  for (std::size_t i = 0; i < n; ++i) top.push_back(to_ranked(scored[i]));

  std::vector<GroundingMatch> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({*scored[i].bundle, scored[i].similarity, static_cast<int>(i + 1), false, top});
  }
  return out;
}

GroundingMatch ground_in_pool(std::string_view intent, PoolKind pool, const BundleCatalog& catalog,
                              Emotion emotion, const Embedder& embedder, const GroundingConfig& config) {
  if (blank(intent)) throw Error(Errc::empty_intent, "empty intent for pool " + std::string(to_string(pool)));
  const auto candidates = filter_candidates(catalog.pool(pool), emotion, config);
  const auto scored = rank_all(intent, candidates, embedder);

  const auto n = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.top_k, 1)), scored.size());
  std::vector<RankedCandidate> top;
  top.reserve(n);
  for (std::size_t i = 0; i < n; ++i) top.push_back(to_ranked(scored[i]));

  const Scored& best = scored.front();
  if (best.similarity >= config.threshold_for(pool)) {
    return {*best.bundle, best.similarity, 1, false, std::move(top)};
  }
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].bundle->is_safe_default) {
      return {*scored[i].bundle, scored[i].similarity, static_cast<int>(i + 1), true, std::move(top)};
    }
  }
  // from_bundles guarantees a safe default and the filter never drops it.
  throw Error(Errc::validation, "pool " + std::string(to_string(pool)) + " lost its safe default");
}

GroundingMatch ground_self(std::string_view intent, const BundleCatalog& catalog, Emotion emotion,
                           const Embedder& embedder, const GroundingConfig& config) {
  return ground_in_pool(intent, PoolKind::to_self, catalog, emotion, embedder, config);
}

std::pair<GroundingMatch, std::optional<GroundingMatch>> ground_pair(
    std::string_view talk_name, const std::optional<std::string>& nontalk_name,
    const BundleCatalog& catalog, Emotion emotion, const Embedder& embedder,
    const GroundingConfig& config) {
  auto talk = ground_in_pool(talk_name, PoolKind::talk, catalog, emotion, embedder, config);
  std::optional<GroundingMatch> nontalk;
  if (nontalk_name && !blank(*nontalk_name)) {
    nontalk = ground_in_pool(*nontalk_name, PoolKind::non_talk, catalog, emotion, embedder, config);
  }
  return {std::move(talk), std::move(nontalk)};
}

}  // namespace bounded::ground
