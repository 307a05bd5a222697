#pragma once

#include <functional>

#include "bounded/core/http.hpp"
#include "bounded/policy/policy.hpp"

namespace bounded::policy {

// Remote text-generation service.
//
// Request:  POST {"schema_version": 1, "request": "propose" | "dialogue",
//                 "context": {...}, "grounded"?: {...}, "attempt"?: n}
// Response: propose  -> {"talk_name", "nontalk_name"?, "dialogue"?, "self_intent"?}
//           dialogue -> {"dialogue"}
class RemotePolicy final : public PolicyBackend {
 public:
  using DebugLog = std::function<void(const Json& request, const Json& response)>;

  explicit RemotePolicy(HttpEndpoint endpoint, DebugLog debug_log = nullptr)
      : endpoint_(std::move(endpoint)), debug_log_(std::move(debug_log)) {}

  PolicyProposal propose(const PolicyContext& context) override;
  std::string generate_dialogue(const PolicyContext& context, const DialoguePair& pair,
                                int attempt) override;
  std::string id() const override { return "remote"; }

 private:
  Json call(const Json& request);

  HttpEndpoint endpoint_;
  DebugLog debug_log_;
};

// Parses a propose response; throws policy_failure/malformed_response.
PolicyProposal parse_proposal(const Json& response, bool self_directed);

}  // namespace bounded::policy
