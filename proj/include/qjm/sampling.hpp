#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "qjm/bloch.hpp"

namespace qjm {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream) pairs.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline Vec3 random_unit_vector(Rng& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

/// Uniform in the ball of the given radius: Gaussian direction, cube-root radius.
inline Vec3 random_in_ball(Rng& rng, double radius = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec3 dir = random_unit_vector(rng);
  return dir * (radius * std::cbrt(u(rng)));
}

inline MeasurementTuple random_tuple(Rng& rng, std::size_t arity) {
  std::vector<Measurement> items;
  items.reserve(arity);
  for (std::size_t i = 0; i < arity; ++i) items.push_back({random_in_ball(rng)});
  return MeasurementTuple(std::move(items));
}

}  // namespace qjm
