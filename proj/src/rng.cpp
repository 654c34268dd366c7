#include "nlslab/rng.hpp"

#include <cmath>

namespace nlslab {

ComplexArray FieldSampler::even_scalar(const Grid& g, int k_lo, int k_hi) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  k_hi = std::min(k_hi, g.n() / 2 - 1);
  ComplexArray u = ComplexArray::Zero(g.n());
  const double dk = M_PI / g.half_length();
  for (int k = k_lo; k <= k_hi; ++k) {
    // Gaussian envelope in k keeps draws smooth under grid refinement.
    const double env = std::exp(-std::pow((k - k_lo) / std::max(1.0, 0.5 * (k_hi - k_lo)), 2));
    const Complex c(gauss(rng_) * env, gauss(rng_) * env);
    u += c * (dk * k * g.xs()).cos().cast<Complex>();
  }
  const double nrm = std::sqrt(g.integrate(RealArray(u.abs2())));
  if (nrm > 0) u /= nrm;
  return u;
}

VecField FieldSampler::even_vec(const Grid& g, int k_lo, int k_hi) {
  ComplexArray v = even_scalar(g, k_lo, k_hi);
  VecField f = VecField::from_scalar(g, v);
  const double nrm = f.l2_norm();
  if (nrm > 0) f *= Complex(1.0 / nrm, 0.0);
  return f;
}

double FieldSampler::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng_);
}

}  // namespace nlslab
