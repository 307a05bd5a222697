#include "bounded/core/errors.hpp"

namespace bounded {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::parse: return "parse_error";
    case Errc::validation: return "validation_error";
    case Errc::contract_violation: return "contract_violation";
    case Errc::empty_candidates: return "empty_candidates";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::zero_vector: return "zero_vector";
    case Errc::empty_intent: return "empty_intent";
    case Errc::embedder_failure: return "embedder_failure";
    case Errc::policy_failure: return "policy_failure";
    case Errc::empty_trace: return "empty_trace";
    case Errc::unknown_pool: return "unknown_pool";
    case Errc::unknown_bundle: return "unknown_bundle";
    case Errc::unknown_agent: return "unknown_agent";
    case Errc::unknown_room: return "unknown_room";
    case Errc::ownership: return "ownership_violation";
    case Errc::replay: return "replay_error";
    case Errc::io: return "io_failure";
  }
  return "unknown";
}

std::string_view to_string(PolicyFailureKind kind) {
  switch (kind) {
    case PolicyFailureKind::none: return "none";
    case PolicyFailureKind::timeout: return "timeout";
    case PolicyFailureKind::transport: return "transport_error";
    case PolicyFailureKind::malformed_response: return "malformed_response";
  }
  return "unknown";
}

namespace {

std::string decorate(Errc code, const std::string& what, std::optional<std::size_t> line) {
  std::string out(to_string(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += what;
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& what, std::optional<std::size_t> line,
             PolicyFailureKind policy_kind)
    : std::runtime_error(decorate(code, what, line)),
      code_(code),
      line_(line),
      policy_kind_(policy_kind) {}

void contract_violation(const std::string& what) { throw Error(Errc::contract_violation, what); }

}  // namespace bounded
