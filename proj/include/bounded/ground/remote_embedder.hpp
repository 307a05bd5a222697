#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>

#include "bounded/core/http.hpp"
#include "bounded/ground/embedder.hpp"

namespace bounded::ground {

// HTTP encoder client: POST {"texts": [...]} -> {"vectors": [[...]]}.
// Timeouts, non-200 responses and schema violations throw
// Error(Errc::embedder_failure).
class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(HttpEndpoint endpoint, std::string model_id, std::size_t dimension);

  Vector embed(std::string_view text) const override;
  std::vector<Vector> embed_batch(const std::vector<std::string>& texts) const;
  std::size_t dimension() const override { return dimension_; }
  std::string model_id() const override { return model_id_; }

 private:
  HttpEndpoint endpoint_;
  std::string model_id_;
  std::size_t dimension_;
};

// Memoizes another embedder. Safe for concurrent use.
class CachingEmbedder final : public Embedder {
 public:
  explicit CachingEmbedder(std::shared_ptr<const Embedder> inner) : inner_(std::move(inner)) {}

  Vector embed(std::string_view text) const override;
  std::size_t dimension() const override { return inner_->dimension(); }
  std::string model_id() const override { return inner_->model_id(); }

 private:
  std::shared_ptr<const Embedder> inner_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, Vector> cache_;
};

}  // namespace bounded::ground
