#include "bounded/core/json.hpp"

#include <string>

#include "bounded/core/errors.hpp"

namespace bounded {

namespace {

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(Errc::parse, std::string("missing field '") + key + "'");
  }
  return j.at(key).get<T>();
}

template <typename T>
std::optional<T> optional_field(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

Json bundle_to_json(const BehaviorBundle& b) {
  Json j;
  j["id"] = b.id;
  j["name"] = b.name;
  j["pool"] = std::string(to_string(b.pool));
  Json valence = Json::array();
  for (Emotion e : b.emotion_valence) valence.push_back(std::string(to_string(e)));
  j["emotion_valence"] = valence;
  j["pglv"] = b.pglv;
  j["relationship_delta"] = b.relationship_delta;
  j["safe_default"] = b.is_safe_default;
  if (!b.metadata.empty()) {
    Json meta = Json::object();
    for (const auto& [k, v] : b.metadata) meta[k] = Json::parse(v);
    j["metadata"] = meta;
  }
  return j;
}

BehaviorBundle bundle_from_json(const Json& j) {
  BehaviorBundle b;
  b.id = required<std::string>(j, "id");
  b.name = required<std::string>(j, "name");
  const auto pool = required<std::string>(j, "pool");
  auto kind = parse_pool(pool);
  if (!kind) throw Error(Errc::parse, "bundle '" + b.id + "': unknown pool '" + pool + "'");
  b.pool = *kind;
  if (j.contains("emotion_valence")) {
    for (const auto& v : j.at("emotion_valence")) {
      const auto name = v.get<std::string>();
      auto e = parse_emotion(name);
      if (!e || *e == Emotion::neutral) {
        throw Error(Errc::parse, "bundle '" + b.id + "': unknown emotion valence '" + name + "'");
      }
      b.emotion_valence.insert(*e);
    }
  }
  const auto& pglv = j.contains("pglv") ? j.at("pglv") : Json();
  if (!pglv.is_number_integer()) {
    throw Error(Errc::parse, "bundle '" + b.id + "': pglv must be an integer");
  }
  b.pglv = pglv.get<int>();
  b.relationship_delta = optional_field<int>(j, "relationship_delta").value_or(0);
  b.is_safe_default = optional_field<bool>(j, "safe_default").value_or(false);
  if (j.contains("metadata")) {
    const auto& meta = j.at("metadata");
    if (!meta.is_object()) throw Error(Errc::parse, "bundle '" + b.id + "': metadata must be an object");
    for (const auto& [k, v] : meta.items()) b.metadata[k] = v.dump();
  }
  return b;
}

Json event_to_json(const Event& e) {
  Json j;
  j["event_id"] = e.event_id;
  j["logical_time"] = e.logical_time;
  j["actor"] = e.actor;
  j["target"] = e.target ? Json(*e.target) : Json();
  j["source"] = e.source;
  j["kind"] = std::string(to_string(e.kind));
  if (e.bundle_pair) {
    j["bundle_pair"] = {{"talk", e.bundle_pair->talk},
                        {"nontalk", e.bundle_pair->nontalk ? Json(*e.bundle_pair->nontalk) : Json()}};
  } else {
    j["bundle_pair"] = nullptr;
  }
  j["self_bundle"] = e.self_bundle ? Json(*e.self_bundle) : Json();
  j["dialogue"] = e.dialogue ? Json(*e.dialogue) : Json();
  j["whisper_text"] = e.whisper_text ? Json(*e.whisper_text) : Json();
  j["reply_to"] = e.reply_to ? Json(*e.reply_to) : Json();
  j["chain_root"] = e.chain_root;
  j["superseded"] = e.superseded;
  return j;
}

Event event_from_json(const Json& j) {
  Event e;
  e.event_id = required<EventId>(j, "event_id");
  e.logical_time = required<Tick>(j, "logical_time");
  e.actor = required<std::string>(j, "actor");
  e.target = optional_field<std::string>(j, "target");
  e.source = required<int>(j, "source");
  const auto kind = required<std::string>(j, "kind");
  auto k = parse_event_kind(kind);
  if (!k) throw Error(Errc::parse, "unknown event kind '" + kind + "'");
  e.kind = *k;
  if (j.contains("bundle_pair") && !j.at("bundle_pair").is_null()) {
    const auto& p = j.at("bundle_pair");
    e.bundle_pair = BundlePair{required<std::string>(p, "talk"), optional_field<std::string>(p, "nontalk")};
  }
  e.self_bundle = optional_field<std::string>(j, "self_bundle");
  e.dialogue = optional_field<std::string>(j, "dialogue");
  e.whisper_text = optional_field<std::string>(j, "whisper_text");
  e.reply_to = optional_field<EventId>(j, "reply_to");
  e.chain_root = optional_field<EventId>(j, "chain_root").value_or(e.event_id);
  e.superseded = optional_field<bool>(j, "superseded").value_or(false);
  return e;
}

Json agent_to_json(const AgentState& a) {
  Json j;
  j["agent_id"] = a.agent_id;
  j["display_name"] = a.display_name;
  j["emotion"] = std::string(to_string(a.emotion));
  Json rel = Json::object();
  for (const auto& [peer, score] : a.relationship) rel[peer] = score;
  j["relationship"] = rel;
  j["talk_state"] = a.talk_state;
  j["heartbeat_period"] = a.heartbeat_period;
  j["next_heartbeat"] = a.next_heartbeat;
  j["rng_seed"] = a.rng_seed;
  j["owner"] = a.owner ? Json(*a.owner) : Json();
  j["persona"] = a.persona ? Json(*a.persona) : Json();
  j["harness_driven"] = a.harness_driven;
  return j;
}

AgentState agent_from_json(const Json& j) {
  AgentState a;
  a.agent_id = required<std::string>(j, "agent_id");
  a.display_name = optional_field<std::string>(j, "display_name").value_or(a.agent_id);
  const auto emotion = optional_field<std::string>(j, "emotion").value_or("neutral");
  auto e = parse_emotion(emotion);
  if (!e) throw Error(Errc::parse, "agent '" + a.agent_id + "': unknown emotion '" + emotion + "'");
  a.emotion = *e;
  if (j.contains("relationship")) {
    for (const auto& [peer, score] : j.at("relationship").items()) a.relationship[peer] = score.get<int>();
  }
  a.talk_state = optional_field<std::uint32_t>(j, "talk_state").value_or(0);
  a.heartbeat_period = optional_field<Tick>(j, "heartbeat_period").value_or(40);
  a.next_heartbeat = optional_field<Tick>(j, "next_heartbeat").value_or(0);
  a.rng_seed = optional_field<std::uint64_t>(j, "rng_seed").value_or(0);
  a.owner = optional_field<std::string>(j, "owner");
  a.persona = optional_field<std::string>(j, "persona");
  a.harness_driven = optional_field<bool>(j, "harness_driven").value_or(false);
  return a;
}

}  // namespace bounded
