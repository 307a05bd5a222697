#include <doctest.h>

#include <chrono>
#include <mutex>

#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "bounded/core/errors.hpp"
#include "bounded/core/rng.hpp"
#include "bounded/gateway/gateway.hpp"
#include "bounded/gateway/protocol.hpp"
#include "bounded/gateway/server.hpp"
#include "support.hpp"

using namespace bounded;
using namespace bounded::gateway;

namespace {

std::string random_text(Rng& rng, std::size_t max_len) {
  static const std::vector<std::string> units = {"a", "b", "X", "Z", " ", "0", "9", "\"", "\\", "/",
                                                  "\n", "\t", "{", "]", ":", ",", "é", "☃"};
  std::string s;
  const auto n = rng.below(max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s += units[rng.below(units.size())];
  return s;
}

std::optional<std::string> maybe(Rng& rng, std::size_t max_len) {
  if (rng.below(2) == 0) return std::nullopt;
  return random_text(rng, max_len);
}

Event random_event(Rng& rng) {
  Event e;
  e.event_id = rng.next() >> 12;
  e.logical_time = static_cast<Tick>(rng.below(100000));
  e.actor = random_text(rng, 8);
  e.target = maybe(rng, 8);
  e.source = static_cast<int>(rng.below(12));
  const EventKind kinds[] = {EventKind::injected_social, EventKind::autonomous_action, EventKind::reply,
                             EventKind::whisper,         EventKind::trigger,           EventKind::self_action,
                             EventKind::fallback};
  e.kind = kinds[rng.below(7)];
  if (rng.below(2) == 0) {
    e.bundle_pair = BundlePair{random_text(rng, 10), maybe(rng, 10)};
  } else {
    e.self_bundle = maybe(rng, 10);
  }
  e.dialogue = maybe(rng, 40);
  e.whisper_text = maybe(rng, 40);
  if (rng.below(2) == 0) e.reply_to = rng.below(1000);
  e.chain_root = rng.below(1000);
  e.superseded = rng.below(2) == 0;
  return e;
}

AgentState random_agent(Rng& rng) {
  AgentState a;
  a.agent_id = random_text(rng, 6) + "id";
  a.display_name = random_text(rng, 12);
  const Emotion emotions[] = {Emotion::happy, Emotion::sad, Emotion::angry, Emotion::neutral};
  a.emotion = emotions[rng.below(4)];
  for (int i = 0, n = static_cast<int>(rng.below(4)); i < n; ++i) {
    a.relationship[random_text(rng, 4) + "p"] = static_cast<int>(rng.below(21)) - 10;
  }
  a.talk_state = static_cast<std::uint32_t>(rng.below(4));
  a.heartbeat_period = 1 + static_cast<Tick>(rng.below(100));
  a.next_heartbeat = static_cast<Tick>(rng.below(1000));
  a.rng_seed = rng.next();
  a.owner = maybe(rng, 8);
  a.persona = maybe(rng, 30);
  a.harness_driven = rng.below(2) == 0;
  return a;
}

ClientMessage random_client(Rng& rng) {
  ClientMessage m;
  const ClientType types[] = {ClientType::join, ClientType::whisper, ClientType::trigger, ClientType::snapshot_request};
  m.type = types[rng.below(4)];
  m.room_id = random_text(rng, 10);
  m.player_id = random_text(rng, 10);
  if (m.type == ClientType::whisper) {
    m.whisper = WhisperPayload{random_text(rng, 6), maybe(rng, 6), "w" + random_text(rng, 90)};
  } else if (m.type == ClientType::trigger) {
    m.trigger = TriggerPayload{random_text(rng, 6), random_text(rng, 12), maybe(rng, 6)};
  }
  return m;
}

ServerMessage random_server(Rng& rng) {
  const auto room = random_text(rng, 10);
  switch (rng.below(4)) {
    case 0:
      return ServerMessage::event(room, random_event(rng));
    case 1: {
      Snapshot s;
      s.room_id = room;
      s.logical_clock = static_cast<Tick>(rng.below(5000));
      for (int i = 0, n = static_cast<int>(rng.below(5)); i < n; ++i) s.agents.push_back(random_agent(rng));
      for (int i = 0, n = static_cast<int>(rng.below(21)); i < n; ++i) s.recent_events.push_back(random_event(rng));
      return ServerMessage::snapshot(s);
    }
    case 2:
      return ServerMessage::error(room, random_text(rng, 12), random_text(rng, 60));
    default: {
      const ClientType types[] = {ClientType::join, ClientType::whisper, ClientType::trigger,
                                  ClientType::snapshot_request};
      std::optional<EventId> id;
      if (rng.below(2) == 0) id = rng.below(1u << 30);
      return ServerMessage::ack(room, types[rng.below(4)], id);
    }
  }
}

struct Recorder {
  std::mutex mu;
  std::vector<ServerMessage> got;
  SendFn fn() {
    return [this](const ServerMessage& m) {
      std::lock_guard lock(mu);
      got.push_back(m);
    };
  }
  std::vector<ServerMessage> take() {
    std::lock_guard lock(mu);
    return std::exchange(got, {});
  }
};

std::shared_ptr<RoomLoop> manual_room() {
  return std::make_shared<RoomLoop>(testing::party_room(), testing::services(), std::chrono::milliseconds(0));
}

ClientMessage join(const std::string& player, const std::string& room = "party") {
  return {ClientType::join, room, player, std::nullopt, std::nullopt};
}

ClientMessage whisper_msg(const std::string& player, const std::string& agent, std::optional<std::string> target,
                          const std::string& text) {
  return {ClientType::whisper, "party", player, WhisperPayload{agent, std::move(target), text}, std::nullopt};
}

ClientMessage trigger_msg(const std::string& player, const std::string& agent, const std::string& bundle,
                          std::optional<std::string> target) {
  return {ClientType::trigger, "party", player, std::nullopt, TriggerPayload{agent, bundle, std::move(target)}};
}

std::string error_code(const ServerMessage& m) {
  REQUIRE(m.type == ServerType::error);
  return std::get<ErrorPayload>(m.payload).code;
}

}  // namespace

TEST_SUITE("gateway") {
  TEST_CASE("wire round trip over generated messages") {
    Rng rng(77);
    for (int i = 0; i < 500; ++i) {
      const auto c = random_client(rng);
      const auto c_text = to_json(c).dump();
      const auto c_back = decode_client_message(c_text);
      CHECK(c_back == c);
      CHECK(to_json(c_back).dump() == c_text);

      const auto s = random_server(rng);
      const auto s_text = to_json(s).dump();
      const auto s_back = decode_server_message(s_text);
      CHECK(s_back == s);
      CHECK(to_json(s_back).dump() == s_text);
      CHECK(Json::parse(s_text)["schema_version"] == kWireSchemaVersion);
      CHECK(Json::parse(c_text)["schema_version"] == kWireSchemaVersion);
    }
  }

  TEST_CASE("malformed client messages") {
    CHECK_THROWS_AS(decode_client_message("not json"), Error);
    CHECK_THROWS_AS(decode_client_message(R"({"type":"join","room_id":"r","player_id":"p"})"), Error);
    CHECK_THROWS_AS(decode_client_message(R"({"schema_version":2,"type":"join","room_id":"r","player_id":"p"})"),
                    Error);
    CHECK_THROWS_AS(decode_client_message(R"({"schema_version":1,"type":"dance","room_id":"r","player_id":"p"})"),
                    Error);
    CHECK_THROWS_AS(
        decode_client_message(R"({"schema_version":1,"type":"whisper","room_id":"r","player_id":"p","payload":{}})"),
        Error);
    Json long_whisper = to_json(whisper_msg("p", "A", std::nullopt, "x"));
    long_whisper["payload"]["text"] = std::string(281, 'x');
    CHECK_THROWS_AS(parse_client_message(long_whisper), Error);
    long_whisper["payload"]["text"] = "   ";
    CHECK_THROWS_AS(parse_client_message(long_whisper), Error);
    Json bad_type = to_json(join("p"));
    bad_type["room_id"] = 5;
    CHECK_THROWS_AS(parse_client_message(bad_type), Error);
  }

  TEST_CASE("session errors") {
    Gateway gw;
    gw.add_room(manual_room());
    Recorder rec;
    auto s = gw.open_session(rec.fn());

    CHECK(error_code(gw.handle_client_message(s, join("player_a", "nowhere"))) == "unknown_room");
    CHECK(error_code(gw.handle_client_message(s, whisper_msg("player_a", "A", "B", "hi"))) == "not_joined");
    CHECK(error_code(gw.handle_text(s, "{oops")) == "bad_message");

    REQUIRE(gw.handle_client_message(s, join("player_a")).type == ServerType::snapshot);
    CHECK(error_code(gw.handle_client_message(s, whisper_msg("player_a", "B", "C", "hi"))) == "ownership_violation");
    CHECK(error_code(gw.handle_client_message(s, whisper_msg("player_b", "B", "C", "hi"))) == "ownership_violation");
    CHECK(error_code(gw.handle_client_message(s, whisper_msg("player_a", "A", "Z", "hi"))) == "unknown_agent");
    CHECK(error_code(gw.handle_client_message(s, trigger_msg("player_a", "A", "talk_nope", "B"))) ==
          "unknown_bundle");
    CHECK(error_code(gw.handle_client_message(s, trigger_msg("player_a", "A", "talk_praise", std::nullopt))) ==
          "validation_error");
    // Every reply also went out through the session, in order.
    CHECK(rec.take().size() == 9);
  }

  TEST_CASE("whisper ack precedes its source-0 event in the next round") {
    auto loop = manual_room();
    Gateway gw;
    gw.add_room(loop);
    Recorder a, b;
    auto sa = gw.open_session(a.fn());
    auto sb = gw.open_session(b.fn());
    gw.handle_client_message(sa, join("player_a"));
    gw.handle_client_message(sb, join("player_b"));
    a.take();
    b.take();

    const auto ack = gw.handle_client_message(sa, whisper_msg("player_a", "A", "B", "compliment their outfit"));
    REQUIRE(ack.type == ServerType::ack);
    const auto id = std::get<AckPayload>(ack.payload).event_id;
    REQUIRE(id);
    CHECK(b.take().empty());

    loop->step();
    const auto seen_a = a.take();
    const auto seen_b = b.take();
    REQUIRE(seen_a.size() >= 2);
    CHECK(seen_a[0].type == ServerType::ack);
    CHECK(seen_a[1].type == ServerType::event);
    const auto& e = std::get<Event>(seen_a[1].payload);
    CHECK(e.event_id == *id);
    CHECK(e.source == 0);
    CHECK(e.kind == EventKind::whisper);
    CHECK(e.dialogue);
    // Broadcast to every subscriber in room order.
    REQUIRE(seen_b.size() == seen_a.size() - 1);
    for (std::size_t i = 0; i < seen_b.size(); ++i) CHECK(seen_b[i] == seen_a[i + 1]);

    // Bruno's reply to the steered line arrives in the same round and stream.
    bool reply = false;
    for (const auto& m : seen_b) {
      const auto& ev = std::get<Event>(m.payload);
      reply = reply || (ev.kind == EventKind::reply && ev.reply_to == id && ev.actor == "B");
    }
    CHECK(reply);

    auto trig = gw.handle_client_message(sa, trigger_msg("player_a", "A", "talk_praise", "C"));
    CHECK(trig.type == ServerType::ack);
    gw.close_session(sb);
    loop->step();
    CHECK(b.take().empty());
  }

  TEST_CASE("join snapshot holds all agents and the last 20 events") {
    auto loop = manual_room();
    Gateway gw;
    gw.add_room(loop);
    Event e;
    e.actor = "A";
    e.target = "B";
    e.bundle_pair = BundlePair{"talk_debate", std::nullopt};
    loop->call([&](runtime::Room& room) { return room.inject_event(e); }).get();
    loop->step(200);
    const auto history = loop->call([](runtime::Room& room) { return room.state().history; }).get();
    REQUIRE(history.size() > 20);

    Recorder rec;
    auto s = gw.open_session(rec.fn());
    const auto reply = gw.handle_client_message(s, join("spectator"));
    REQUIRE(reply.type == ServerType::snapshot);
    const auto& snap = std::get<Snapshot>(reply.payload);
    CHECK(snap.agents.size() == 5);
    CHECK(snap.logical_clock == 200);
    REQUIRE(snap.recent_events.size() == 20);
    CHECK(snap.recent_events.back() == history.back());
    CHECK(snap.recent_events.front() == history[history.size() - 20]);

    const auto again = gw.handle_client_message(s, {ClientType::snapshot_request, "party", "spectator", {}, {}});
    CHECK(again == reply);
  }

  TEST_CASE("websocket transport end to end") {
    namespace beast = boost::beast;
    namespace net = boost::asio;
    auto loop = manual_room();
    Gateway gw;
    gw.add_room(loop);
    WsServer server(gw, "127.0.0.1", 0);
    server.start();

    net::io_context ioc;
    net::ip::tcp::resolver resolver(ioc);
    beast::websocket::stream<net::ip::tcp::socket> ws(ioc);
    net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
    ws.handshake("127.0.0.1", "/");

    auto send = [&](const Json& j) { ws.write(net::buffer(j.dump())); };
    auto recv = [&] {
      beast::flat_buffer buf;
      ws.read(buf);
      return decode_server_message(beast::buffers_to_string(buf.data()));
    };

    send(to_json(join("player_a")));
    CHECK(recv().type == ServerType::snapshot);
    send(to_json(whisper_msg("player_a", "A", "B", "Debate with Bruno")));
    const auto ack = recv();
    REQUIRE(ack.type == ServerType::ack);
    loop->step();
    const auto ev = recv();
    REQUIRE(ev.type == ServerType::event);
    CHECK(std::get<Event>(ev.payload).event_id == std::get<AckPayload>(ack.payload).event_id);
    CHECK(std::get<Event>(ev.payload).bundle_pair->talk == "talk_debate");

    ws.write(net::buffer(std::string("garbage")));
    auto err = recv();
    while (err.type == ServerType::event) err = recv();
    REQUIRE(err.type == ServerType::error);
    CHECK(std::get<ErrorPayload>(err.payload).code == "bad_message");

    ws.close(beast::websocket::close_code::normal);
    server.stop();
    loop->stop();
  }
}
