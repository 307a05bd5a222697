#pragma once

// Randomized grounding properties checked against a brute-force oracle that
// recomputes cosines and the content/emotion filter from scratch.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bounded/core/catalog.hpp"
#include "bounded/core/rng.hpp"
#include "bounded/ground/fixture_embedder.hpp"
#include "bounded/ground/grounding.hpp"

namespace bounded::testing {

struct PropertyStats {
  int trials = 0;
  int checks = 0;
  int pglv_violations = 0;
  int fallback_mismatches = 0;
  int happy_violations = 0;
  int retrieve_mismatches = 0;
  int brute_force_pools = 0;
  // Top-1 within 1e-9 of the threshold; fallback is not judged there.
  int near_threshold = 0;
  std::string first_failure;
};

namespace detail {

inline double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline bool oracle_excluded(Emotion e, const BehaviorBundle& b) {
  const auto has = [&](Emotion t) { return b.emotion_valence.count(t) > 0; };
  if (e == Emotion::happy) return has(Emotion::sad) || has(Emotion::angry);
  if (e == Emotion::sad || e == Emotion::angry) return has(Emotion::happy);
  return false;
}

struct Scored {
  std::string id;
  double sim;
};

inline std::vector<Scored> oracle_rank(const std::vector<const BehaviorBundle*>& pool, const std::string& intent,
                                       const ground::Embedder& emb) {
  const auto q = emb.embed(intent);
  std::vector<Scored> out;
  for (const auto* b : pool) out.push_back({b->id, oracle_cosine(q, emb.embed(b->name))});
  std::sort(out.begin(), out.end(), [](const Scored& x, const Scored& y) {
    if (x.sim != y.sim) return x.sim > y.sim;
    return x.id < y.id;
  });
  return out;
}

// Same order up to floating-point noise between near-equal similarities.
inline bool same_ranking(const std::vector<Scored>& want, const std::vector<ground::GroundingMatch>& got) {
  if (want.size() != got.size()) return false;
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (std::abs(want[i].sim - got[i].similarity) > 1e-9) return false;
    if (want[i].id != got[i].bundle.id) {
      // Accept a swap only between candidates the oracle scores as tied.
      bool tied = false;
      for (std::size_t j = 0; j < want.size(); ++j) {
        if (want[j].id == got[i].bundle.id && std::abs(want[j].sim - want[i].sim) <= 1e-12) tied = true;
      }
      if (!tied) return false;
    }
  }
  return true;
}

}  // namespace detail

inline PropertyStats run_grounding_properties(int n_trials, std::uint64_t seed) {
  using namespace detail;
  PropertyStats st;
  const auto fail = [&](const std::string& what) {
    if (st.first_failure.empty()) st.first_failure = what;
  };

  for (int t = 0; t < n_trials; ++t) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
    const std::size_t dim = 4 + rng.below(20);

    // Vocabulary; about one text in eight duplicates an earlier vector so ties
    // are exercised.
    std::unordered_map<std::string, ground::Vector> table;
    std::vector<std::string> vocab;
    const std::size_t n_vocab = 6 + rng.below(40);
    for (std::size_t i = 0; i < n_vocab; ++i) {
      const std::string text = "text " + std::to_string(t) + "." + std::to_string(i);
      ground::Vector v(dim);
      if (!vocab.empty() && rng.below(8) == 0) {
        v = table.at(vocab[rng.below(vocab.size())]);
      } else {
        double norm = 0;
        do {
          norm = 0;
          for (auto& x : v) {
            x = rng.uniform() * 2.0 - 1.0;
            norm += x * x;
          }
        } while (norm < 1e-6);
      }
      table.emplace(text, v);
      vocab.push_back(text);
    }
    ground::FixtureEmbedder emb(dim, "prop", table);

    std::vector<BehaviorBundle> bundles;
    for (PoolKind pool : {PoolKind::talk, PoolKind::non_talk, PoolKind::to_self}) {
      const std::size_t size = 1 + rng.below(50);
      for (std::size_t i = 0; i < size; ++i) {
        BehaviorBundle b;
        b.id = std::string(to_string(pool)) + "_" + std::to_string(i);
        b.name = vocab[rng.below(vocab.size())];
        b.pool = pool;
        b.is_safe_default = i == 0;
        if (!b.is_safe_default) {
          b.pglv = 1 + static_cast<int>(rng.below(3));
          for (Emotion e : {Emotion::happy, Emotion::sad, Emotion::angry}) {
            if (rng.below(3) == 0) b.emotion_valence.insert(e);
          }
        }
        bundles.push_back(std::move(b));
      }
    }
    // Shuffle so the safe default is not always first in its pool.
    for (std::size_t i = bundles.size(); i > 1; --i) std::swap(bundles[i - 1], bundles[rng.below(i)]);
    const auto catalog = BundleCatalog::from_bundles(bundles);

    ground::GroundingConfig cfg;
    cfg.fallback_threshold = rng.uniform() * 0.9;
    cfg.max_pglv = 1 + static_cast<int>(rng.below(3));
    const Emotion emotions[] = {Emotion::happy, Emotion::sad, Emotion::angry, Emotion::neutral};
    const Emotion emotion = emotions[rng.below(4)];
    const std::string intent =
        rng.below(5) == 0 ? "unlisted intent " + std::to_string(t) : vocab[rng.below(vocab.size())];

    ++st.trials;
    for (PoolKind pool : {PoolKind::talk, PoolKind::non_talk, PoolKind::to_self}) {
      const auto& members = catalog.pool(pool);
      std::vector<const BehaviorBundle*> allowed;
      for (const auto& b : members) {
        if (b.is_safe_default || (b.pglv <= cfg.max_pglv && !oracle_excluded(emotion, b))) allowed.push_back(&b);
      }
      const auto want = oracle_rank(allowed, intent, emb);
      const auto tag = "trial " + std::to_string(t) + " pool " + std::string(to_string(pool));

      for (Emotion e : {emotion, Emotion::happy}) {
        const auto m = ground::ground_in_pool(intent, pool, catalog, e, emb, cfg);
        ++st.checks;
        if (m.bundle.pglv > cfg.max_pglv) {
          ++st.pglv_violations;
          fail(tag + ": pglv " + std::to_string(m.bundle.pglv) + " above max");
        }
        if (e == Emotion::happy &&
            (m.bundle.emotion_valence.count(Emotion::sad) || m.bundle.emotion_valence.count(Emotion::angry))) {
          ++st.happy_violations;
          fail(tag + ": happy agent got " + m.bundle.id);
        }
        if (e != emotion) continue;
        const double top1 = want.front().sim;
        if (std::abs(top1 - cfg.fallback_threshold) < 1e-9) {
          ++st.near_threshold;
        } else {
          const bool expect_fallback = top1 < cfg.fallback_threshold;
          const bool ok = m.fell_back == expect_fallback &&
                          (expect_fallback ? m.bundle.is_safe_default
                                           : std::abs(m.similarity - top1) <= 1e-9);
          if (!ok) {
            ++st.fallback_mismatches;
            fail(tag + ": fell_back=" + std::to_string(m.fell_back) + " top1=" + std::to_string(top1));
          }
        }
      }

      if (members.size() <= 50) {
        ++st.brute_force_pools;
        const auto candidates = ground::filter_candidates(members, emotion, cfg);
        const auto got = ground::retrieve(intent, candidates, emb, static_cast<int>(candidates.size()) + 1);
        if (!same_ranking(want, got)) {
          ++st.retrieve_mismatches;
          fail(tag + ": retrieve order differs from brute force");
        }
      }
    }
  }
  return st;
}

}  // namespace bounded::testing
