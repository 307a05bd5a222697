#include "bounded/ground/remote_embedder.hpp"

#include "bounded/core/errors.hpp"

namespace bounded::ground {

RemoteEmbedder::RemoteEmbedder(HttpEndpoint endpoint, std::string model_id, std::size_t dimension)
    : endpoint_(std::move(endpoint)), model_id_(std::move(model_id)), dimension_(dimension) {}

Vector RemoteEmbedder::embed(std::string_view text) const {
  return embed_batch({std::string(text)}).front();
}

std::vector<Vector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  Json request{{"texts", texts}, {"model_id", model_id_}};
  auto res = post_json(endpoint_, request);
  if (res.failure) throw Error(Errc::embedder_failure, "encoder request failed: " + res.detail);

  const Json& body = *res.body;
  if (!body.is_object() || !body.contains("vectors") || !body.at("vectors").is_array()) {
    throw Error(Errc::embedder_failure, "encoder response lacks a vectors array");
  }
  const auto& vectors = body.at("vectors");
  if (vectors.size() != texts.size()) {
    throw Error(Errc::embedder_failure, "encoder returned " + std::to_string(vectors.size()) +
                                            " vectors for " + std::to_string(texts.size()) + " texts");
  }
  std::vector<Vector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    Vector vec;
    try {
      vec = v.get<Vector>();
    } catch (const Json::exception& e) {
      throw Error(Errc::embedder_failure, std::string("malformed vector: ") + e.what());
    }
    if (dimension_ != 0 && vec.size() != dimension_) {
      throw Error(Errc::embedder_failure, "encoder vector has " + std::to_string(vec.size()) +
                                              " dims, expected " + std::to_string(dimension_));
    }
    try {
      normalize(vec);
    } catch (const Error&) {
      throw Error(Errc::embedder_failure, "encoder returned a zero vector");
    }
    out.push_back(std::move(vec));
  }
  return out;
}

Vector CachingEmbedder::embed(std::string_view text) const {
  std::string key(text);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  Vector v = inner_->embed(text);
  std::lock_guard lock(mu_);
  return cache_.emplace(std::move(key), std::move(v)).first->second;
}

}  // namespace bounded::ground
