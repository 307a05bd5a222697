#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "bounded/ground/embedder.hpp"

namespace bounded::ground {

// Table-driven embedder for deterministic tests and desk-scale benchmarks.
//
// Listed texts map to their (normalized) table vectors. Unlisted texts map to
// a pseudo-random vector seeded by an FNV-1a hash of the text, with its
// projection onto the span of the table removed, so an out-of-vocabulary text
// has zero similarity to every listed one. When the table spans the whole
// space the raw hashed vector is used instead.
//
// File format (JSONL): a header {"dimension": d, "model_id": "..."} followed
// by {"text": "...", "vector": [d numbers]} lines. Vectors may be stored
// unnormalized.
class FixtureEmbedder final : public Embedder {
 public:
  FixtureEmbedder(std::size_t dimension, std::string model_id,
                  std::unordered_map<std::string, Vector> table);

  static FixtureEmbedder parse(std::istream& in);
  static FixtureEmbedder load(const std::filesystem::path& path);

  Vector embed(std::string_view text) const override;
  std::size_t dimension() const override { return dimension_; }
  std::string model_id() const override { return model_id_; }

  bool contains(std::string_view text) const;
  std::size_t size() const { return table_.size(); }

 private:
  Vector hashed(std::string_view text) const;

  std::size_t dimension_;
  std::string model_id_;
  std::unordered_map<std::string, Vector> table_;
  // Orthonormal basis of span(table).
  std::vector<Vector> basis_;
};

}  // namespace bounded::ground
