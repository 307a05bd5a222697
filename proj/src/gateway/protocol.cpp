#include "bounded/gateway/protocol.hpp"

#include "bounded/core/errors.hpp"
#include "bounded/whisper/whisper.hpp"

namespace bounded::gateway {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(Errc::validation, std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string string_field(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) throw Error(Errc::validation, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return string_field(j, key);
}

const Json& payload_of(const Json& j) {
  const auto& p = field(j, "payload");
  if (!p.is_object()) throw Error(Errc::validation, "payload must be an object");
  return p;
}

void check_envelope(const Json& j) {
  if (!j.is_object()) throw Error(Errc::validation, "message must be a JSON object");
  const auto& v = field(j, "schema_version");
  if (!v.is_number_integer() || v.get<int>() != kWireSchemaVersion) {
    throw Error(Errc::validation, "unsupported schema_version " + v.dump());
  }
}

std::optional<ClientType> parse_client_type(std::string_view s) {
  if (s == "join") return ClientType::join;
  if (s == "whisper") return ClientType::whisper;
  if (s == "trigger") return ClientType::trigger;
  if (s == "snapshot_request") return ClientType::snapshot_request;
  return std::nullopt;
}

std::optional<ServerType> parse_server_type(std::string_view s) {
  if (s == "event") return ServerType::event;
  if (s == "snapshot") return ServerType::snapshot;
  if (s == "error") return ServerType::error;
  if (s == "ack") return ServerType::ack;
  return std::nullopt;
}

Json opt(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(Errc::validation, std::string("malformed message: ") + e.what());
  }
}

Snapshot snapshot_from_json(const Json& p) {
  Snapshot s;
  s.room_id = string_field(p, "room_id");
  s.logical_clock = field(p, "logical_clock").get<Tick>();
  for (const auto& a : field(p, "agents")) s.agents.push_back(agent_from_json(a));
  for (const auto& e : field(p, "recent_events")) s.recent_events.push_back(event_from_json(e));
  return s;
}

}  // namespace

std::string_view to_string(ClientType t) {
  switch (t) {
    case ClientType::join: return "join";
    case ClientType::whisper: return "whisper";
    case ClientType::trigger: return "trigger";
    case ClientType::snapshot_request: return "snapshot_request";
  }
  return "?";
}

std::string_view to_string(ServerType t) {
  switch (t) {
    case ServerType::event: return "event";
    case ServerType::snapshot: return "snapshot";
    case ServerType::error: return "error";
    case ServerType::ack: return "ack";
  }
  return "?";
}

ServerMessage ServerMessage::event(std::string room, Event e) {
  return {ServerType::event, std::move(room), std::move(e)};
}

ServerMessage ServerMessage::snapshot(Snapshot s) {
  std::string room = s.room_id;
  return {ServerType::snapshot, std::move(room), std::move(s)};
}

ServerMessage ServerMessage::error(std::string room, std::string code, std::string message) {
  return {ServerType::error, std::move(room), ErrorPayload{std::move(code), std::move(message)}};
}

ServerMessage ServerMessage::ack(std::string room, ClientType of, std::optional<EventId> id) {
  return {ServerType::ack, std::move(room), AckPayload{of, id}};
}

Json to_json(const Snapshot& s) {
  Json agents = Json::array();
  for (const auto& a : s.agents) agents.push_back(agent_to_json(a));
  Json events = Json::array();
  for (const auto& e : s.recent_events) events.push_back(event_to_json(e));
  return {{"room_id", s.room_id}, {"logical_clock", s.logical_clock}, {"agents", agents}, {"recent_events", events}};
}

Json to_json(const ClientMessage& m) {
  Json j = {{"schema_version", kWireSchemaVersion},
            {"type", std::string(to_string(m.type))},
            {"room_id", m.room_id},
            {"player_id", m.player_id}};
  Json payload = Json::object();
  if (m.whisper) {
    payload = {{"agent_id", m.whisper->agent_id}, {"target_id", opt(m.whisper->target_id)}, {"text", m.whisper->text}};
  } else if (m.trigger) {
    payload = {{"agent_id", m.trigger->agent_id},
               {"bundle_id", m.trigger->bundle_id},
               {"target_id", opt(m.trigger->target_id)}};
  }
  j["payload"] = payload;
  return j;
}

Json to_json(const ServerMessage& m) {
  Json j = {{"schema_version", kWireSchemaVersion}, {"type", std::string(to_string(m.type))}, {"room_id", m.room_id}};
  switch (m.type) {
    case ServerType::event: j["payload"] = event_to_json(std::get<Event>(m.payload)); break;
    case ServerType::snapshot: j["payload"] = to_json(std::get<Snapshot>(m.payload)); break;
    case ServerType::error: {
      const auto& e = std::get<ErrorPayload>(m.payload);
      j["payload"] = {{"code", e.code}, {"message", e.message}};
      break;
    }
    case ServerType::ack: {
      const auto& a = std::get<AckPayload>(m.payload);
      j["payload"] = {{"of", std::string(to_string(a.of))}, {"event_id", a.event_id ? Json(*a.event_id) : Json(nullptr)}};
      break;
    }
  }
  return j;
}

ClientMessage parse_client_message(const Json& j) {
  return guarded([&] {
    check_envelope(j);
    ClientMessage m;
    const auto type = string_field(j, "type");
    auto t = parse_client_type(type);
    if (!t) throw Error(Errc::validation, "unknown client message type '" + type + "'");
    m.type = *t;
    m.room_id = string_field(j, "room_id");
    m.player_id = string_field(j, "player_id");
    if (m.type == ClientType::whisper) {
      const auto& p = payload_of(j);
      WhisperPayload w{string_field(p, "agent_id"), optional_string(p, "target_id"), string_field(p, "text")};
      if (w.text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw Error(Errc::validation, "whisper text is empty");
      }
      if (w.text.size() > whisper::kMaxWhisperChars) {
        throw Error(Errc::validation,
                    "whisper longer than " + std::to_string(whisper::kMaxWhisperChars) + " characters");
      }
      m.whisper = std::move(w);
    } else if (m.type == ClientType::trigger) {
      const auto& p = payload_of(j);
      m.trigger = TriggerPayload{string_field(p, "agent_id"), string_field(p, "bundle_id"), optional_string(p, "target_id")};
    }
    return m;
  });
}

ClientMessage decode_client_message(std::string_view text) {
  Json j = Json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::parse, "message is not valid JSON");
  return parse_client_message(j);
}

ServerMessage parse_server_message(const Json& j) {
  return guarded([&] {
    check_envelope(j);
    const auto type = string_field(j, "type");
    auto t = parse_server_type(type);
    if (!t) throw Error(Errc::validation, "unknown server message type '" + type + "'");
    const auto room = string_field(j, "room_id");
    const auto& p = payload_of(j);
    switch (*t) {
      case ServerType::event: return ServerMessage::event(room, event_from_json(p));
      case ServerType::snapshot: {
        auto s = snapshot_from_json(p);
        if (s.room_id != room) throw Error(Errc::validation, "snapshot room_id does not match envelope");
        return ServerMessage::snapshot(std::move(s));
      }
      case ServerType::error: return ServerMessage::error(room, string_field(p, "code"), string_field(p, "message"));
      case ServerType::ack: {
        const auto of = string_field(p, "of");
        auto ct = parse_client_type(of);
        if (!ct) throw Error(Errc::validation, "unknown ack target '" + of + "'");
        std::optional<EventId> id;
        if (p.contains("event_id") && !p.at("event_id").is_null()) id = p.at("event_id").get<EventId>();
        return ServerMessage::ack(room, *ct, id);
      }
    }
    throw Error(Errc::validation, "unreachable server message type");
  });
}

ServerMessage decode_server_message(std::string_view text) {
  Json j = Json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::parse, "message is not valid JSON");
  return parse_server_message(j);
}

}  // namespace bounded::gateway
