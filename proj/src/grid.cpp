#include "nlslab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace nlslab {

namespace {

// FFTW plans are cached per transform size. Plan creation is not thread-safe,
// execution through fftw_execute_dft on caller arrays is.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

PlanPair& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  PlanPair p;
  std::vector<Complex> tmp(static_cast<size_t>(n));
  auto* ptr = reinterpret_cast<fftw_complex*>(tmp.data());
  p.forward = fftw_plan_dft_1d(n, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_1d(n, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(n, p).first->second;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(double half_length, int n_points, double dt, double t_max)
    : half_length_(half_length), n_(n_points), dt_(dt), t_max_(t_max) {
  if (half_length <= 0.0) throw ResolutionError("grid half length must be positive");
  if (!is_power_of_two(n_points)) throw ResolutionError("grid size must be a power of two");
  if (dt <= 0.0) throw ResolutionError("time step must be positive");
  if (t_max <= 0.0) throw ResolutionError("time horizon must be positive");
  dx_ = 2.0 * half_length_ / n_;
  xs_.resize(n_);
  for (int i = 0; i < n_; ++i) xs_[i] = x(i);
  ks_.resize(n_);
  const double dk = M_PI / half_length_;
  for (int i = 0; i < n_; ++i) ks_[i] = dk * (i <= n_ / 2 ? i : i - n_);
}

double Grid::omega_max() const {
  const double nyquist = M_PI / dx_;
  const double r = nyquist / 8.0;
  return r * r;
}

void Grid::fft(ComplexArray& data) const {
  auto& p = plans_for(n_);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p.forward, ptr, ptr);
}

void Grid::ifft(ComplexArray& data) const {
  auto& p = plans_for(n_);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p.backward, ptr, ptr);
  data /= static_cast<double>(n_);
}

ComplexArray Grid::derivative(const ComplexArray& f, int order) const {
  ComplexArray g = f;
  fft(g);
  const Complex I(0.0, 1.0);
  if (order == 1) {
    g *= I * ks_.cast<Complex>();
    // kill the unmatched Nyquist mode of an odd-order derivative
    g[n_ / 2] = 0.0;
  } else if (order == 2) {
    g *= (-ks_.square()).cast<Complex>();
  } else {
    ComplexArray mult = (I * ks_.cast<Complex>()).pow(order);
    if (order % 2 == 1) mult[n_ / 2] = 0.0;
    g *= mult;
  }
  ifft(g);
  return g;
}

RealArray Grid::bracket_x_pow(double s) const {
  return (1.0 + xs_.square()).pow(0.5 * s);
}

}  // namespace nlslab
