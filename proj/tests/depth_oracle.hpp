#pragma once

#include <algorithm>
#include <map>

namespace bounded::testing {

// Terminal depth of one pairwise chain, computed by pushing probability mass
// forward one reply at a time. The injected event is answered with certainty
// at source 2; a reply at source s is answered with 1 - (s - 1) * alpha,
// clamped to [0, 1]; reaching the cap ends the chain there.
inline std::map<int, double> depth_oracle(double alpha, int cap) {
  std::map<int, double> out;
  double mass = 1.0;  // probability the chain is alive at the current depth
  int depth = 2;
  while (depth < cap) {
    const double answer = std::clamp(1.0 - (depth - 1) * alpha, 0.0, 1.0);
    out[depth] = mass * (1.0 - answer);
    mass *= answer;
    ++depth;
  }
  out[std::max(cap, 2)] += mass;
  return out;
}

}  // namespace bounded::testing
