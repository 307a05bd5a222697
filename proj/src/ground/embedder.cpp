#include "bounded/ground/embedder.hpp"

#include <algorithm>
#include <cmath>

#include "bounded/core/errors.hpp"

namespace bounded::ground {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(Errc::dimension_mismatch,
                "cosine over " + std::to_string(u.size()) + " vs " + std::to_string(v.size()) + " dims");
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(Errc::zero_vector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

void normalize(Vector& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  if (n == 0.0) throw Error(Errc::zero_vector, "cannot normalize a zero vector");
  n = std::sqrt(n);
  for (double& x : v) x /= n;
}

}  // namespace bounded::ground
