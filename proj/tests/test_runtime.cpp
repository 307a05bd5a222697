#include <doctest.h>

#include <set>
#include <sstream>

#include "bounded/core/errors.hpp"
#include "bounded/core/priority.hpp"
#include "bounded/runtime/room.hpp"
#include "bounded/runtime/trace.hpp"
#include "support.hpp"

using namespace bounded;
using namespace bounded::runtime;

namespace {

struct Harness {
  Services s = testing::services();
  MemoryTraceSink sink;
  std::unique_ptr<Room> room;

  explicit Harness(RoomConfig cfg = testing::app_config().room) {
    auto st = testing::party_room();
    cfg.master_seed = st.config.master_seed;
    st.config = cfg;
    room = std::make_unique<Room>(st, *s.catalog, *s.embedder, *s.policy, &sink);
  }

  EventId inject(const AgentId& actor, const AgentId& target, const BundleId& talk = "talk_debate") {
    Event e;
    e.actor = actor;
    e.target = target;
    e.bundle_pair = BundlePair{talk, std::nullopt};
    return room->inject_event(e);
  }

  std::vector<Json> records(const std::string& type) const {
    std::vector<Json> out;
    for (const auto& l : sink.lines()) {
      auto j = Json::parse(l);
      if (j["type"] == type) out.push_back(j);
    }
    return out;
  }
};

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::io;
}

class FailingReplies final : public policy::PolicyBackend {
 public:
  explicit FailingReplies(policy::PolicyBackend& inner) : inner_(inner) {}
  policy::PolicyProposal propose(const policy::PolicyContext& c) override {
    if (c.stimulus.kind == policy::StimulusKind::event) {
      throw Error(Errc::policy_failure, "stub timeout", std::nullopt, PolicyFailureKind::timeout);
    }
    return inner_.propose(c);
  }
  std::string generate_dialogue(const policy::PolicyContext& c, const policy::DialoguePair& p, int a) override {
    return inner_.generate_dialogue(c, p, a);
  }
  std::string id() const override { return "failing"; }

 private:
  policy::PolicyBackend& inner_;
};

RoomConfig decay_off() {
  auto cfg = testing::app_config().room;
  cfg.decay_enabled = false;
  return cfg;
}

}  // namespace

TEST_SUITE("runtime") {
  TEST_CASE("injection validation") {
    Harness h;
    Event e;
    e.actor = "A";
    e.target = "B";
    e.bundle_pair = BundlePair{"talk_debate", std::nullopt};
    e.source = 2;
    CHECK(code_of([&] { h.room->inject_event(e); }) == Errc::contract_violation);
    e.source = 0;
    e.target = "A";
    CHECK(code_of([&] { h.room->inject_event(e); }) == Errc::validation);
    e.target = "Z";
    CHECK(code_of([&] { h.room->inject_event(e); }) == Errc::unknown_agent);
    e.target = "B";
    e.bundle_pair = BundlePair{"talk_nope", std::nullopt};
    CHECK(code_of([&] { h.room->inject_event(e); }) == Errc::unknown_bundle);
    e.bundle_pair = BundlePair{"nt_nod", std::nullopt};
    CHECK(code_of([&] { h.room->inject_event(e); }) == Errc::unknown_bundle);
    e.bundle_pair = BundlePair{"talk_debate", "talk_praise"};
    CHECK(code_of([&] { h.room->inject_event(e); }) == Errc::unknown_bundle);
    e.bundle_pair.reset();
    CHECK(code_of([&] { h.room->inject_event(e); }) == Errc::validation);
    CHECK(h.room->pending_inputs() == 0);
  }

  TEST_CASE("trigger validation and execution") {
    Harness h;
    Trigger t{"player_a", "A", "talk_praise", "B"};
    CHECK(code_of([&] { h.room->submit_trigger({"player_b", "A", "talk_praise", "B"}); }) == Errc::ownership);
    CHECK(code_of([&] { h.room->submit_trigger({"player_a", "A", "talk_nope", "B"}); }) == Errc::unknown_bundle);
    CHECK(code_of([&] { h.room->submit_trigger({"player_a", "A", "talk_praise", std::nullopt}); }) ==
          Errc::validation);
    CHECK(code_of([&] { h.room->submit_trigger({"player_a", "A", "talk_praise", "A"}); }) == Errc::validation);

    const auto id = h.room->submit_trigger(t);
    const auto self_id = h.room->submit_trigger({"player_b", "B", "self_dance", std::nullopt});
    const auto events = h.room->advance_round();
    REQUIRE(events.size() >= 2);
    CHECK(events[0].event_id == id);
    CHECK(events[0].kind == EventKind::trigger);
    CHECK(events[0].source == 0);
    CHECK(events[0].bundle_pair->talk == "talk_praise");
    CHECK(events[1].event_id == self_id);
    CHECK(events[1].self_bundle == std::optional<BundleId>("self_dance"));

    auto strict = testing::app_config().room;
    strict.grounding.max_pglv = 2;
    Harness h2(strict);
    CHECK(code_of([&] { h2.room->submit_trigger({"player_a", "A", "talk_flirt", "B"}); }) == Errc::validation);
  }

  TEST_CASE("empty rounds emit nothing") {
    Harness h;
    h.room->advance_round();  // A's heartbeat is due at tick 0
    for (int i = 1; i < 8; ++i) CHECK(h.room->advance_round().empty());
    const auto at8 = h.room->advance_round();
    REQUIRE(at8.size() == 1);
    CHECK(at8[0].actor == "B");
    CHECK(at8[0].source == 1);
    CHECK(at8[0].kind == EventKind::self_action);
  }

  TEST_CASE("a pending whisper defers a due heartbeat") {
    Harness h;
    h.room->submit_whisper({"player_a", "A", std::nullopt, "read a book quietly", 0});
    const auto r0 = h.room->advance_round();
    REQUIRE(r0.size() == 1);
    CHECK(r0[0].kind == EventKind::whisper);
    CHECK(h.room->state().agent("A").next_heartbeat == 0);
    const auto r1 = h.room->advance_round();
    REQUIRE(r1.size() == 1);
    CHECK(r1[0].source == 1);
    CHECK(h.room->state().agent("A").next_heartbeat == 41);
  }

  TEST_CASE("decay-off chain halts at the depth cap at end of round") {
    Harness h(decay_off());
    const auto root = h.inject("A", "B");
    while (h.room->chain(root) == nullptr || h.room->chain(root)->open()) h.room->advance_round();
    const auto* c = h.room->chain(root);
    REQUIRE(c->halted);
    CHECK(*c->halted == HaltReason::depth_cap);
    CHECK(c->max_source == 10);
    const auto halts = h.records("halt");
    REQUIRE(halts.size() == 1);
    CHECK(halts[0]["reason"] == "depth_cap");
    CHECK(halts[0]["chain_root"] == root);

    // Every reply answers its parent with next_source.
    std::map<EventId, Event> by_id;
    for (const auto& e : h.room->state().history) by_id[e.event_id] = e;
    for (const auto& e : h.room->state().history) {
      CHECK_FALSE(check_event_invariants(e));
      if (e.kind == EventKind::reply) {
        REQUIRE(e.reply_to);
        CHECK(e.source == next_source(by_id.at(*e.reply_to).source));
        CHECK(e.target == std::optional<AgentId>(by_id.at(*e.reply_to).actor));
      }
    }
  }

  TEST_CASE("a responder earlier in scenario order overshoots the cap by one") {
    Harness h(decay_off());
    const auto root = h.inject("E", "A");
    while (h.room->chain(root) == nullptr || h.room->chain(root)->open()) h.room->advance_round();
    CHECK(h.room->chain(root)->max_source == 11);
    CHECK(*h.room->chain(root)->halted == HaltReason::depth_cap);
  }

  TEST_CASE("event ceiling halts long chains") {
    auto cfg = decay_off();
    cfg.depth_cap = 1000;
    cfg.event_ceiling = 6;
    Harness h(cfg);
    const auto root = h.inject("A", "B");
    while (h.room->chain(root) == nullptr || h.room->chain(root)->open()) h.room->advance_round();
    const auto* c = h.room->chain(root);
    REQUIRE(c->halted);
    CHECK(*c->halted == HaltReason::event_ceiling);
    CHECK(c->events == 6);
    CHECK(h.room->pending_stimuli() == 0);
  }

  TEST_CASE("decay-on chains end naturally with a failed draw") {
    Harness h;
    const auto root = h.inject("A", "B");
    while (h.room->chain(root) == nullptr || h.room->chain(root)->open()) h.room->advance_round();
    const auto* c = h.room->chain(root);
    CHECK(c->natural());
    CHECK(c->failed_draws == 1);
    CHECK(c->max_source >= 2);
    CHECK(c->max_source <= 6);
    const auto decisions = h.records("decision");
    REQUIRE_FALSE(decisions.empty());
    CHECK(decisions.back()["outcome"] == "continuation_failed");
    CHECK(decisions.back()["decay"]["source"] == c->max_source);
  }

  TEST_CASE("whisper interrupts a held lock; replies are rejected") {
    auto cfg = testing::app_config().room;
    cfg.talk_duration = 3;
    Harness h(cfg);
    const auto root = h.inject("A", "B");
    h.room->advance_round();  // A speaks and holds the lock; B answers at source 2
    REQUIRE(h.room->state().agent("A").talk_locked());

    const auto wid = h.room->submit_whisper({"player_a", "A", "C", "compliment them", 1});
    const auto r1 = h.room->advance_round();
    REQUIRE_FALSE(r1.empty());
    CHECK(r1[0].event_id == wid);
    CHECK(r1[0].source == 0);
    const auto events = h.records("event");
    const auto& wrec = *std::find_if(events.begin(), events.end(),
                                     [&](const Json& j) { return j["event"]["event_id"] == wid; });
    CHECK(wrec["lock"] == "interrupt");
    CHECK(wrec["supersedes"] == root);
    CHECK(h.room->state().history.front().superseded);

    // B's source-2 reply is still waiting for A, who is locked until tick 4.
    h.room->advance_round();
    bool rejected = false;
    for (const auto& d : h.records("decision")) {
      rejected = rejected || (d["agent"] == "A" && d["outcome"] == "lock_rejected");
    }
    CHECK(rejected);
  }

  TEST_CASE("policy failures skip the cycle without stalling the room") {
    auto s = testing::services();
    FailingReplies failing(*s.policy);
    MemoryTraceSink sink;
    Room room(testing::party_room(), *s.catalog, *s.embedder, failing, &sink);
    Event e;
    e.actor = "A";
    e.target = "B";
    e.bundle_pair = BundlePair{"talk_debate", std::nullopt};
    const auto root = room.inject_event(e);
    for (int i = 0; i < 50; ++i) room.advance_round();
    const auto* c = room.chain(root);
    REQUIRE(c);
    CHECK(c->events == 1);
    CHECK_FALSE(c->open());
    bool saw = false;
    for (const auto& l : sink.lines()) saw = saw || l.find("\"policy_failure\"") != std::string::npos;
    CHECK(saw);
    CHECK_FALSE(room.state().agent("B").talk_locked());
    // Heartbeats continue.
    CHECK(room.state().history.size() > 3);
  }

  TEST_CASE("bystanders join chains when enabled") {
    auto cfg = decay_off();
    cfg.bystander_reply_prob = 1.0;
    cfg.event_ceiling = 1000;
    Harness h(cfg);
    const auto root = h.inject("A", "B");
    for (int i = 0; i < 3; ++i) h.room->advance_round();
    std::set<AgentId> actors;
    for (const auto& e : h.room->state().history) {
      if (e.chain_root == root) actors.insert(e.actor);
    }
    CHECK(actors.size() > 2);
  }

  TEST_CASE("priority classes are non-increasing within a round") {
    auto cfg = testing::app_config().room;
    cfg.autonomous_target_prob = 0.5;
    cfg.bystander_reply_prob = 0.3;
    Harness h(cfg);
    Rng rng(5);
    const char* players[] = {"player_a", "player_b", "player_c", "player_d", "player_e"};
    const char* texts[] = {"compliment them", "debate the plan", "comfort them", "dance to the music", "xyzzy"};
    for (int round = 0; round < 300; ++round) {
      if (rng.below(3) == 0) {
        const auto a = rng.below(5);
        auto t = rng.below(5);
        std::optional<AgentId> target;
        if (t != a) target = std::string(1, static_cast<char>('A' + t));
        h.room->submit_whisper({players[a], std::string(1, static_cast<char>('A' + a)), target, texts[rng.below(5)],
                                h.room->now()});
      }
      if (rng.below(10) == 0) h.inject("C", "D");
      const auto events = h.room->advance_round();
      for (std::size_t i = 1; i < events.size(); ++i) {
        CHECK(classify_priority(events[i - 1]) >= classify_priority(events[i]));
      }
      for (const auto& e : events) CHECK_FALSE(check_event_invariants(e));
    }
  }

  TEST_CASE("trace replay reproduces the final state") {
    auto cfg = testing::app_config().room;
    cfg.autonomous_target_prob = 0.4;
    cfg.bystander_reply_prob = 0.2;
    Harness h(cfg);
    h.inject("A", "B");
    h.room->submit_whisper({"player_c", "C", "D", "compliment them", 0});
    for (int i = 0; i < 150; ++i) {
      if (i % 37 == 5) h.inject("E", "C", "talk_praise");
      h.room->advance_round();
    }
    std::istringstream in(h.sink.text());
    const auto r = replay_trace(in);
    CHECK(same_replayable_state(r.state, h.room->state()));
    CHECK(r.events == h.room->state().history.size());
    CHECK(r.state.logical_clock == 150);
    bool any_score = false;
    for (const auto& a : r.state.agents) {
      for (const auto& [peer, score] : a.relationship) any_score = any_score || score != 0;
    }
    CHECK(any_score);
  }

  TEST_CASE("replay rejects corrupted traces with the line number") {
    Harness h;
    h.inject("A", "B");
    for (int i = 0; i < 20; ++i) h.room->advance_round();
    auto lines = h.sink.lines();
    REQUIRE(lines.size() > 6);

    const auto replay_error = [](const std::vector<std::string>& ls) -> std::pair<Errc, std::size_t> {
      std::string text;
      for (const auto& l : ls) text += l + "\n";
      std::istringstream in(text);
      try {
        replay_trace(in);
      } catch (const Error& e) {
        return {e.code(), e.line().value_or(0)};
      }
      return {Errc::io, 0};
    };

    auto broken = lines;
    broken[4] = "{\"type\":\"event\",\"event\":{";
    CHECK(replay_error(broken) == std::make_pair(Errc::replay, std::size_t{5}));

    broken = lines;
    broken[3] = R"({"type":"mystery"})";
    CHECK(replay_error(broken) == std::make_pair(Errc::replay, std::size_t{4}));

    // Events out of order.
    std::vector<std::size_t> event_lines;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (Json::parse(lines[i])["type"] == "event") event_lines.push_back(i);
    }
    REQUIRE(event_lines.size() >= 2);
    broken = lines;
    std::swap(broken[event_lines[0]], broken[event_lines[1]]);
    CHECK(replay_error(broken).first == Errc::replay);
    // The violation is visible at the second of the swapped lines.
    CHECK(replay_error(broken).second == event_lines[1] + 1);

    broken.assign(lines.begin() + 1, lines.end());
    CHECK(replay_error(broken) == std::make_pair(Errc::replay, std::size_t{1}));
    CHECK(replay_error({"", "  "}).first == Errc::empty_trace);
    CHECK(replay_error({}).first == Errc::empty_trace);
  }

  TEST_CASE("identical seeds give byte-identical traces") {
    auto run = [] {
      auto cfg = testing::app_config().room;
      cfg.autonomous_target_prob = 0.3;
      Harness h(cfg);
      h.inject("B", "C");
      h.room->submit_whisper({"player_d", "D", "E", "debate the plan", 0});
      for (int i = 0; i < 120; ++i) h.room->advance_round();
      return h.sink.text();
    };
    const auto a = run();
    CHECK(a == run());
    CHECK(a.size() > 1000);
  }

  TEST_CASE("scenario and config loading errors") {
    std::istringstream dup_owner(
        "{\"type\":\"room\",\"room_id\":\"r\",\"master_seed\":1}\n"
        "{\"type\":\"agent\",\"agent_id\":\"A\",\"display_name\":\"a\",\"emotion\":\"neutral\",\"heartbeat_offset\":0,"
        "\"owner\":\"p\"}\n"
        "{\"type\":\"agent\",\"agent_id\":\"B\",\"display_name\":\"b\",\"emotion\":\"neutral\",\"heartbeat_offset\":0,"
        "\"owner\":\"p\"}\n");
    CHECK(code_of([&] { parse_scenario(dup_owner); }) == Errc::validation);

    std::istringstream bad_emotion(
        "{\"type\":\"room\",\"room_id\":\"r\",\"master_seed\":1}\n"
        "{\"type\":\"agent\",\"agent_id\":\"A\",\"display_name\":\"a\",\"emotion\":\"elated\",\"heartbeat_offset\":0}\n");
    try {
      parse_scenario(bad_emotion);
      FAIL("bad emotion accepted");
    } catch (const Error& e) {
      CHECK(e.line().value_or(0) == 2);
    }

    RoomConfig cfg;
    cfg.alpha = -0.1;
    CHECK(code_of([&] { cfg.validate(); }) == Errc::validation);
    CHECK(code_of([] { load_app_config("/nonexistent/config.json"); }) == Errc::io);
  }
}
