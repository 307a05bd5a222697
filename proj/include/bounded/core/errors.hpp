#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bounded {

enum class Errc {
  parse,
  validation,
  contract_violation,
  empty_candidates,
  dimension_mismatch,
  zero_vector,
  empty_intent,
  embedder_failure,
  policy_failure,
  empty_trace,
  unknown_pool,
  unknown_bundle,
  unknown_agent,
  unknown_room,
  ownership,
  replay,
  io,
};

std::string_view to_string(Errc code);

// Failure sub-kinds for policy backends. The runtime turns any of these into
// a skipped cycle.
enum class PolicyFailureKind { none, timeout, transport, malformed_response };

std::string_view to_string(PolicyFailureKind kind);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> line = std::nullopt,
        PolicyFailureKind policy_kind = PolicyFailureKind::none);

  Errc code() const noexcept { return code_; }
  // 1-based line number for file parse/replay errors.
  std::optional<std::size_t> line() const noexcept { return line_; }
  PolicyFailureKind policy_kind() const noexcept { return policy_kind_; }

 private:
  Errc code_;
  std::optional<std::size_t> line_;
  PolicyFailureKind policy_kind_;
};

[[noreturn]] void contract_violation(const std::string& what);

}  // namespace bounded
