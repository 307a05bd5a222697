#include "bounded/core/http.hpp"

#include <httplib.h>

namespace bounded {

namespace {

struct SplitUrl {
  std::string scheme_host_port;
  std::string path;
};

std::optional<SplitUrl> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return SplitUrl{url, "/"};
  return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResult post_json(const HttpEndpoint& endpoint, const Json& body) {
  HttpResult out;
  auto parts = split_url(endpoint.url);
  if (!parts) {
    out.failure = HttpFailure::transport;
    out.detail = "bad endpoint url '" + endpoint.url + "'";
    return out;
  }

  httplib::Client client(parts->scheme_host_port);
  const auto secs = endpoint.timeout_ms / 1000;
  const auto usecs = (endpoint.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (endpoint.authorization) headers.emplace("Authorization", *endpoint.authorization);

  const std::string payload = body.dump();
  for (int attempt = 0; attempt <= endpoint.retries; ++attempt) {
    auto res = client.Post(parts->path, headers, payload, "application/json");
    if (!res) {
      const auto err = res.error();
      out.failure = (err == httplib::Error::Read || err == httplib::Error::Write ||
                     err == httplib::Error::ConnectionTimeout)
                        ? HttpFailure::timeout
                        : HttpFailure::transport;
      out.detail = httplib::to_string(err);
      continue;
    }
    out.status = res->status;
    if (res->status != 200) {
      out.failure = HttpFailure::status;
      out.detail = "HTTP " + std::to_string(res->status);
      return out;
    }
    try {
      out.body = Json::parse(res->body);
      out.failure.reset();
    } catch (const Json::parse_error& e) {
      out.failure = HttpFailure::malformed;
      out.detail = e.what();
    }
    return out;
  }
  return out;
}

}  // namespace bounded
