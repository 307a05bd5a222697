#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bounded::ground {

using Vector = std::vector<double>;

// Sentence encoder. Implementations return unit-norm vectors of a fixed
// dimension and are deterministic for a given text. Failures surface as
// Error(Errc::embedder_failure).
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual Vector embed(std::string_view text) const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::string model_id() const = 0;
};

// dot(u, v) / (|u| |v|). Throws dimension_mismatch or zero_vector.
double cosine(std::span<const double> u, std::span<const double> v);

// Scales v to unit norm in place. Throws zero_vector.
void normalize(Vector& v);

}  // namespace bounded::ground
