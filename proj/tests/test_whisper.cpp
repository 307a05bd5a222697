#include <doctest.h>

#include "bounded/core/errors.hpp"
#include "bounded/harness/benchmarks.hpp"
#include "bounded/runtime/room.hpp"
#include "bounded/whisper/whisper.hpp"
#include "support.hpp"

using namespace bounded;
using namespace bounded::whisper;

namespace {

Whisper make(std::string agent, std::optional<std::string> target, std::string text, std::string player = "") {
  if (player.empty()) player = "player_" + std::string(1, static_cast<char>(agent[0] - 'A' + 'a'));
  return {player, agent, std::move(target), std::move(text), 0};
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::io;
}

}  // namespace

TEST_SUITE("whisper") {
  TEST_CASE("routing by target") {
    CHECK(route_whisper(make("A", "B", "x")) == WhisperRoute::to_other);
    CHECK(route_whisper(make("A", std::nullopt, "x")) == WhisperRoute::to_self);
    CHECK(route_whisper(make("A", "A", "x")) == WhisperRoute::to_self);
  }

  TEST_CASE("validation") {
    const auto room = testing::party_room();
    CHECK_NOTHROW(validate_whisper(make("A", "B", "hello"), room));
    CHECK(code_of([&] { validate_whisper(make("A", "B", "  \n"), room); }) == Errc::empty_intent);
    CHECK(code_of([&] { validate_whisper(make("A", "B", std::string(281, 'x')), room); }) == Errc::validation);
    CHECK_NOTHROW(validate_whisper(make("A", "B", std::string(280, 'x')), room));
    CHECK(code_of([&] { validate_whisper(make("A", "B", "hi", "player_b"), room); }) == Errc::ownership);
    CHECK(code_of([&] { validate_whisper(make("A", "Z", "hi"), room); }) == Errc::unknown_agent);
    CHECK(code_of([&] { validate_whisper(make("Q", "B", "hi", "player_q"), room); }) == Errc::unknown_agent);
  }

  TEST_CASE("to-other goes through the policy, to-self does not") {
    auto s = testing::services();
    const auto room = testing::party_room();
    const auto cfg = room.config.grounding;

    const auto other = whisper_to_other(make("A", "B", "Debate with Bruno"), room, *s.policy, *s.embedder,
                                        *s.catalog, cfg);
    REQUIRE(other.talk);
    CHECK(other.talk->bundle.id == "talk_debate");
    REQUIRE(other.nontalk);
    CHECK(other.nontalk->bundle.id == "nt_cross_arms");
    CHECK(other.target == std::optional<AgentId>("B"));
    CHECK(other.source == 0);
    CHECK(other.priority == PriorityClass::A);
    REQUIRE(other.dialogue_request);
    CHECK(other.dialogue_request->whisper_text == std::optional<std::string>("Debate with Bruno"));

    const auto self = whisper_to_self(make("A", std::nullopt, "read a book quietly"), room, *s.embedder, *s.catalog, cfg);
    REQUIRE(self.self);
    CHECK(self.self->bundle.id == "self_read");
    CHECK_FALSE(self.fell_back());
    CHECK_FALSE(self.proposal);

    const auto drift = whisper_to_self(make("B", std::nullopt, "summon a dragon"), room, *s.embedder, *s.catalog, cfg);
    CHECK(drift.fell_back());
    CHECK(drift.self->bundle.is_safe_default);
  }

  TEST_CASE("whisper becomes one source-0 event in the next round") {
    auto s = testing::services();
    runtime::MemoryTraceSink sink;
    runtime::Room room(testing::party_room(), *s.catalog, *s.embedder, *s.policy, &sink);
    const auto id = room.submit_whisper(make("A", "B", "compliment their outfit"));
    CHECK(room.state().history.empty());
    const auto events = room.advance_round();
    REQUIRE_FALSE(events.empty());
    const auto& e = events.front();
    CHECK(e.event_id == id);
    CHECK(e.kind == EventKind::whisper);
    CHECK(e.source == 0);
    CHECK(e.actor == "A");
    CHECK(e.target == std::optional<AgentId>("B"));
    CHECK(e.whisper_text == std::optional<std::string>("compliment their outfit"));
    REQUIRE(e.bundle_pair);
    CHECK(e.bundle_pair->talk == "talk_praise");
    CHECK(e.dialogue == std::optional<std::string>("Bruno, that was really impressive!"));
    // Player steering raises A's regard for B by the bundle's delta.
    CHECK(room.state().agent("A").score_toward("B") == 1);
  }

  TEST_CASE("benchmark over the shipped cases") {
    auto s = testing::services();
    const auto report = harness::run_whisper_benchmark(
        harness::load_whisper_cases(testing::data_dir() / "cases/whisper_cases.jsonl"),
        harness::load_cross_pairs(testing::data_dir() / "cases/cross_whisper.jsonl"), testing::party_room(), *s.policy,
        *s.embedder, *s.catalog);
    CHECK(report.to_other.n == 20);
    CHECK(report.to_other.auto_aligned == 20);
    CHECK(report.to_other.aligned_rate() == doctest::Approx(1.0));
    CHECK(report.to_self.n == 10);
    CHECK(report.to_self.auto_aligned == 10);
    CHECK(report.to_self.aligned_rate() == doctest::Approx(0.6));
    CHECK(report.to_self.failure_modes.at("semantic_drift") == 4);
    CHECK(report.flips == 5);
    for (const auto& r : report.results) {
      if (r.whisper.condition == harness::WhisperCondition::to_self && !r.whisper.expected) CHECK(r.fell_back);
    }
  }
}
