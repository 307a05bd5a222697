#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace bounded {

// Portable seeded random stream.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Conversions to doubles and bounded integers are done here rather
// than with <random> distributions, whose algorithms are implementation
// defined. Every helper consumes exactly one engine output.
//
// Stream splitting: a stream for (master, id) is seeded with
// splitmix64(master ^ splitmix64(id + 1)).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  static std::uint64_t splitmix64(std::uint64_t x);
  static std::uint64_t derive(std::uint64_t master, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // True with probability p; p <= 0 is always false and p >= 1 always true.
  bool bernoulli(double p) { return uniform() < p; }

  // Uniform index in [0, n). n must be positive.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace bounded
