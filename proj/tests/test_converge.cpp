#include <doctest.h>

#include <cmath>
#include <map>

#include "bounded/converge/converge.hpp"
#include "bounded/core/errors.hpp"
#include "bounded/core/priority.hpp"
#include "bounded/harness/trial.hpp"
#include "depth_oracle.hpp"
#include "support.hpp"

using namespace bounded;
using namespace bounded::converge;

TEST_SUITE("converge") {
  TEST_CASE("reply probability schedule at alpha 0.2") {
    const DecayConfig cfg{0.2, true};
    const double expected[] = {1.0, 0.8, 0.6, 0.4, 0.2, 0.0};
    for (int s = 1; s <= 6; ++s) CHECK(std::abs(reply_probability(s, cfg) - expected[s - 1]) <= 1e-12);
    for (int s = 6; s < 40; ++s) CHECK(reply_probability(s, cfg) == 0.0);
    // Source 0 would give 1.2; it is clamped to a probability.
    CHECK(reply_probability(0, cfg) == 1.0);
    CHECK_THROWS_AS(reply_probability(-1, cfg), Error);
  }

  TEST_CASE("decay disabled and other alphas") {
    for (int s = 0; s < 30; ++s) CHECK(reply_probability(s, DecayConfig{0.2, false}) == 1.0);
    CHECK(reply_probability(3, DecayConfig{0.0, true}) == 1.0);
    CHECK(reply_probability(2, DecayConfig{0.5, true}) == doctest::Approx(0.5));
    CHECK(reply_probability(3, DecayConfig{0.5, true}) == 0.0);
    CHECK(reply_probability(2, DecayConfig{1.5, true}) == 0.0);
  }

  TEST_CASE("continuation consumes exactly one draw") {
    Rng a(11), b(11);
    const auto d = draw_continuation(3, DecayConfig{}, a);
    CHECK(d.draw == b.uniform());
    CHECK(d.continued == (d.draw < 0.6));
    CHECK(a.next() == b.next());
    // Probability zero never continues, one always does.
    for (int i = 0; i < 200; ++i) {
      CHECK_FALSE(sample_continuation(6, DecayConfig{}, a));
      CHECK(sample_continuation(1, DecayConfig{}, a));
    }
  }

  TEST_CASE("pure-chain Monte Carlo tracks the independent oracle") {
    const auto want = testing::depth_oracle(0.2, 10);
    Rng rng(2024);
    std::map<int, double> got;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      int source = 0;
      int depth = 0;
      for (;;) {
        if (!sample_continuation(source, DecayConfig{}, rng)) break;
        source = next_source(source);
        depth = source;
        if (depth >= 10) break;
      }
      got[depth] += 1.0 / n;
    }
    CHECK(got.count(0) == 0);
    double tv = 0;
    for (int d = 2; d <= 10; ++d) tv += std::abs(got[d] - want.at(d));
    CHECK(tv / 2 < 0.02);
  }

  TEST_CASE("library oracle equals the test-side oracle") {
    for (double alpha : {0.0, 0.1, 0.2, 0.25, 0.3, 0.5, 1.0}) {
      for (int cap : {2, 3, 6, 10, 15}) {
        const auto lib = harness::depth_distribution_oracle(alpha, cap);
        const auto ref = testing::depth_oracle(alpha, cap);
        CAPTURE(alpha);
        CAPTURE(cap);
        double sum = 0;
        for (const auto& [d, p] : lib) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        for (const auto& [d, p] : ref) CHECK(std::abs(lib.count(d) ? lib.at(d) - p : p) <= 1e-12);
      }
    }
    const auto t = harness::depth_distribution_oracle(0.2, 10);
    CHECK(t.at(2) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(t.at(3) == doctest::Approx(0.32).epsilon(1e-12));
    CHECK(t.at(4) == doctest::Approx(0.288).epsilon(1e-12));
    CHECK(t.at(5) == doctest::Approx(0.1536).epsilon(1e-12));
    CHECK(t.at(6) == doctest::Approx(0.0384).epsilon(1e-12));
  }

  TEST_CASE("reply focus prefers the highest relationship score") {
    AgentState me;
    me.agent_id = "A";
    Event e1, e2, e3;
    e1.event_id = 1;
    e2.event_id = 2;
    e3.event_id = 3;
    std::vector<StimulusCandidate> c{{e1, 1}, {e2, 5}, {e3, -2}};
    Rng a(3), b(3);
    CHECK(select_reply_stimulus(me, c, a).event.event_id == 2);
    // A unique maximum consumes no draw.
    CHECK(a.next() == b.next());

    std::vector<StimulusCandidate> tie{{e1, 4}, {e2, 4}, {e3, 0}};
    std::map<EventId, int> seen;
    Rng r(8);
    for (int i = 0; i < 400; ++i) ++seen[select_reply_stimulus(me, tie, r).event.event_id];
    CHECK(seen.count(3) == 0);
    CHECK(seen[1] > 150);
    CHECK(seen[2] > 150);

    CHECK_THROWS_AS(select_reply_stimulus(me, {}, r), Error);
  }

  TEST_CASE("talk lock admits only source 0 while held") {
    AgentState a;
    Event reply;
    reply.source = 3;
    reply.kind = EventKind::reply;
    Event whisper;
    whisper.source = 0;
    whisper.kind = EventKind::whisper;

    CHECK(try_acquire_talk_lock(a, reply) == LockDecision::accepted);
    CHECK(a.talk_locked());
    const auto before = a;
    CHECK(try_acquire_talk_lock(a, reply) == LockDecision::rejected);
    CHECK(a == before);
    Event hb;
    hb.source = 1;
    hb.kind = EventKind::autonomous_action;
    CHECK(try_acquire_talk_lock(a, hb) == LockDecision::rejected);
    CHECK(try_acquire_talk_lock(a, whisper) == LockDecision::interrupt);
    CHECK(a.talk_locked());
    release_talk_lock(a);
    CHECK_FALSE(a.talk_locked());
    // Higher bits are reserved and survive lock changes.
    a.talk_state = 0b110;
    try_acquire_talk_lock(a, reply);
    release_talk_lock(a);
    CHECK(a.talk_state == 0b110);
  }

  TEST_CASE("dialogue dedup window and paraphrase threshold") {
    const auto s = testing::services();
    const auto& emb = *s.embedder;
    std::vector<Utterance> recent{{"Nice to see you!", 100}};
    CHECK(is_duplicate_dialogue("Nice to see you!", recent, 120, 60, emb, 0.9));
    CHECK(is_duplicate_dialogue("So nice to see you!", recent, 120, 60, emb, 0.9));
    CHECK_FALSE(is_duplicate_dialogue("So nice to see you!", recent, 120, 60, emb, 0.96));
    CHECK_FALSE(is_duplicate_dialogue("Nice to see you!", recent, 161, 60, emb, 0.9));
    CHECK(is_duplicate_dialogue("Nice to see you!", recent, 160, 60, emb, 0.9));
    CHECK_FALSE(is_duplicate_dialogue("Something else entirely", recent, 120, 60, emb, 0.9));
  }
}
