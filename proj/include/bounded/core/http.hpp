#pragma once

#include <optional>
#include <string>

#include "bounded/core/json.hpp"

namespace bounded {

struct HttpEndpoint {
  // http://host:port/path
  std::string url;
  int timeout_ms = 5000;
  int retries = 0;
  // Sent verbatim as the Authorization header when set.
  std::optional<std::string> authorization;
};

enum class HttpFailure { timeout, transport, status, malformed };

struct HttpResult {
  std::optional<Json> body;
  std::optional<HttpFailure> failure;
  int status = 0;
  std::string detail;
};

// One JSON POST, retried up to endpoint.retries extra times on transport
// failures and timeouts. Never throws.
HttpResult post_json(const HttpEndpoint& endpoint, const Json& body);

}  // namespace bounded
