#include "bounded/policy/remote_policy.hpp"

#include "bounded/core/errors.hpp"

namespace bounded::policy {

namespace {

[[noreturn]] void fail(PolicyFailureKind kind, const std::string& detail) {
  throw Error(Errc::policy_failure, detail, std::nullopt, kind);
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) fail(PolicyFailureKind::malformed_response, std::string(key) + " is not a string");
  return j.at(key).get<std::string>();
}

Json bundle_brief(const BehaviorBundle& b) {
  return {{"id", b.id}, {"name", b.name}, {"pool", std::string(to_string(b.pool))}};
}

}  // namespace

PolicyProposal parse_proposal(const Json& response, bool self_directed) {
  if (!response.is_object()) fail(PolicyFailureKind::malformed_response, "response is not an object");
  PolicyProposal p;
  p.nontalk_name = optional_string(response, "nontalk_name");
  p.dialogue = optional_string(response, "dialogue");
  p.self_intent = optional_string(response, "self_intent");
  p.rationale = optional_string(response, "rationale");
  auto talk = optional_string(response, "talk_name");
  if (self_directed) {
    if (!p.self_intent) p.self_intent = talk;
    if (!p.self_intent || p.self_intent->empty()) {
      fail(PolicyFailureKind::malformed_response, "response missing self_intent");
    }
    p.talk_name = *p.self_intent;
    return p;
  }
  if (!talk || talk->empty()) fail(PolicyFailureKind::malformed_response, "response missing talk_name");
  p.talk_name = *talk;
  return p;
}

Json RemotePolicy::call(const Json& request) {
  auto res = post_json(endpoint_, request);
  if (debug_log_) debug_log_(request, res.body ? *res.body : Json());
  if (res.failure) {
    switch (*res.failure) {
      case HttpFailure::timeout: fail(PolicyFailureKind::timeout, res.detail);
      case HttpFailure::transport:
      case HttpFailure::status: fail(PolicyFailureKind::transport, res.detail);
      case HttpFailure::malformed: fail(PolicyFailureKind::malformed_response, res.detail);
    }
  }
  return *res.body;
}

PolicyProposal RemotePolicy::propose(const PolicyContext& context) {
  Json request{{"schema_version", kSchemaVersion}, {"request", "propose"}, {"context", context_to_json(context)}};
  return parse_proposal(call(request), context.self_directed);
}

std::string RemotePolicy::generate_dialogue(const PolicyContext& context, const DialoguePair& pair,
                                            int attempt) {
  Json grounded{{"talk", bundle_brief(pair.talk)},
                {"nontalk", pair.nontalk ? bundle_brief(*pair.nontalk) : Json()}};
  Json request{{"schema_version", kSchemaVersion},
               {"request", "dialogue"},
               {"context", context_to_json(context)},
               {"grounded", grounded},
               {"attempt", attempt}};
  const Json response = call(request);
  auto text = response.is_object() ? optional_string(response, "dialogue") : std::nullopt;
  if (!text) fail(PolicyFailureKind::malformed_response, "response missing dialogue");
  return *text;
}

}  // namespace bounded::policy
