#include "bounded/ground/fixture_embedder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>

#include <json.hpp>

#include "bounded/core/errors.hpp"
#include "bounded/core/rng.hpp"

namespace bounded::ground {

namespace {

constexpr double kRankTolerance = 1e-9;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

void remove_projection(Vector& v, const std::vector<Vector>& basis) {
  for (const auto& q : basis) {
    const double c = dot(v, q);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
  }
}

}  // namespace

FixtureEmbedder::FixtureEmbedder(std::size_t dimension, std::string model_id,
                                 std::unordered_map<std::string, Vector> table)
    : dimension_(dimension), model_id_(std::move(model_id)), table_(std::move(table)) {
  if (dimension_ == 0) throw Error(Errc::validation, "fixture embedder dimension must be positive");

  // Iterate in key order so the basis, and therefore hashed vectors, do not
  // depend on hash-map layout.
  std::map<std::string, Vector*> ordered;
  for (auto& [text, vec] : table_) {
    if (vec.size() != dimension_) {
      throw Error(Errc::dimension_mismatch, "fixture vector for '" + text + "' has " +
                                                std::to_string(vec.size()) + " dims, expected " +
                                                std::to_string(dimension_));
    }
    normalize(vec);
    ordered.emplace(text, &vec);
  }
  for (const auto& [text, vec] : ordered) {
    if (basis_.size() == dimension_) break;
    Vector r = *vec;
    // Two passes of modified Gram-Schmidt for numerical stability.
    remove_projection(r, basis_);
    remove_projection(r, basis_);
    const double n = norm(r);
    if (n > kRankTolerance) {
      for (double& x : r) x /= n;
      basis_.push_back(std::move(r));
    }
  }
}

FixtureEmbedder FixtureEmbedder::parse(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> dimension;
  std::string model_id = "fixture";
  std::unordered_map<std::string, Vector> table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::parse, e.what(), line_no);
    }
    if (!dimension) {
      if (!j.contains("dimension")) throw Error(Errc::parse, "missing dimension header", line_no);
      dimension = j.at("dimension").get<std::size_t>();
      if (j.contains("model_id")) model_id = j.at("model_id").get<std::string>();
      continue;
    }
    if (!j.contains("text") || !j.contains("vector")) {
      throw Error(Errc::parse, "fixture line needs text and vector", line_no);
    }
    auto text = j.at("text").get<std::string>();
    auto vec = j.at("vector").get<Vector>();
    if (vec.size() != *dimension) {
      throw Error(Errc::dimension_mismatch,
                  "vector for '" + text + "' has " + std::to_string(vec.size()) + " dims", line_no);
    }
    table[std::move(text)] = std::move(vec);
  }
  if (!dimension) throw Error(Errc::parse, "empty fixture embedding file");
  return FixtureEmbedder(*dimension, std::move(model_id), std::move(table));
}

FixtureEmbedder FixtureEmbedder::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open embedding fixture '" + path.string() + "'");
  return parse(in);
}

bool FixtureEmbedder::contains(std::string_view text) const {
  return table_.find(std::string(text)) != table_.end();
}

Vector FixtureEmbedder::embed(std::string_view text) const {
  if (auto it = table_.find(std::string(text)); it != table_.end()) return it->second;
  return hashed(text);
}

Vector FixtureEmbedder::hashed(std::string_view text) const {
  Rng rng(fnv1a(text));
  Vector raw(dimension_);
  for (double& x : raw) x = 2.0 * rng.uniform() - 1.0;
  Vector v = raw;
  remove_projection(v, basis_);
  remove_projection(v, basis_);
  if (norm(v) < 1e-6) v = raw;
  normalize(v);
  return v;
}

}  // namespace bounded::ground
