#pragma once

#include <cstdint>
#include <random>

#include "nlslab/vec_field.hpp"

namespace nlslab {

// Deterministic sampler for test and measurement fields: band-limited even
// bumps t(v, conj v), so every draw satisfies both symmetry invariants.
class FieldSampler {
 public:
  explicit FieldSampler(uint64_t seed) : rng_(seed) {}

  // Random even scalar field built from cosine modes k in [k_lo, k_hi]
  // (units of pi/L), scaled to unit L2 norm.
  ComplexArray even_scalar(const Grid& g, int k_lo = 1, int k_hi = 24);

  // sigma1-symmetric even VecField t(v, conj v) with unit L2 norm.
  VecField even_vec(const Grid& g, int k_lo = 1, int k_hi = 24);

  double uniform(double lo, double hi);

 private:
  std::mt19937_64 rng_;
};

}  // namespace nlslab
