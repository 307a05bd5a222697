#pragma once

// Wire protocol between the gateway and its clients (control panel, harness
// drivers). One JSON object per WebSocket text frame. Every message carries
// "schema_version"; see README for the field-by-field description.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bounded/core/json.hpp"
#include "bounded/core/types.hpp"

namespace bounded::gateway {

inline constexpr int kWireSchemaVersion = 1;
inline constexpr std::size_t kSnapshotWindow = 20;

enum class ClientType { join, whisper, trigger, snapshot_request };
enum class ServerType { event, snapshot, error, ack };

std::string_view to_string(ClientType t);
std::string_view to_string(ServerType t);

struct WhisperPayload {
  AgentId agent_id;
  std::optional<AgentId> target_id;
  std::string text;
  bool operator==(const WhisperPayload&) const = default;
};

struct TriggerPayload {
  AgentId agent_id;
  BundleId bundle_id;
  std::optional<AgentId> target_id;
  bool operator==(const TriggerPayload&) const = default;
};

struct ClientMessage {
  ClientType type = ClientType::join;
  std::string room_id;
  PlayerId player_id;
  // Present exactly for whisper / trigger.
  std::optional<WhisperPayload> whisper;
  std::optional<TriggerPayload> trigger;
  bool operator==(const ClientMessage&) const = default;
};

struct Snapshot {
  std::string room_id;
  Tick logical_clock = 0;
  std::vector<AgentState> agents;
  // Oldest first, at most kSnapshotWindow.
  std::vector<Event> recent_events;
  bool operator==(const Snapshot&) const = default;
};

struct ErrorPayload {
  std::string code;
  std::string message;
  bool operator==(const ErrorPayload&) const = default;
};

struct AckPayload {
  ClientType of = ClientType::join;
  // Reserved event id for whisper / trigger acks.
  std::optional<EventId> event_id;
  bool operator==(const AckPayload&) const = default;
};

struct ServerMessage {
  ServerType type = ServerType::ack;
  std::string room_id;
  std::variant<Event, Snapshot, ErrorPayload, AckPayload> payload;
  bool operator==(const ServerMessage&) const = default;

  static ServerMessage event(std::string room, Event e);
  static ServerMessage snapshot(Snapshot s);
  static ServerMessage error(std::string room, std::string code, std::string message);
  static ServerMessage ack(std::string room, ClientType of, std::optional<EventId> id = std::nullopt);
};

Json to_json(const ClientMessage& m);
Json to_json(const ServerMessage& m);
Json to_json(const Snapshot& s);

// Throw Error(parse) for malformed JSON and Error(validation) for wrong
// schema_version, unknown type, missing fields or an oversized whisper.
ClientMessage parse_client_message(const Json& j);
ClientMessage decode_client_message(std::string_view text);
ServerMessage parse_server_message(const Json& j);
ServerMessage decode_server_message(std::string_view text);

}  // namespace bounded::gateway
