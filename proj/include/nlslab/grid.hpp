#pragma once

#include <Eigen/Dense>
#include <complex>

#include "nlslab/errors.hpp"

namespace nlslab {

using Complex = std::complex<double>;
using RealArray = Eigen::ArrayXd;
using ComplexArray = Eigen::ArrayXcd;

// Uniform periodic lattice on [-L, L) with N points plus the time step and
// horizon of a run. Immutable after construction; cheap to copy.
class Grid {
 public:
  // N must be a power of two. Throws ResolutionError on invalid sizes.
  Grid(double half_length, int n_points, double dt = 2e-3, double t_max = 50.0);

  double half_length() const { return half_length_; }
  int n() const { return n_; }
  double dx() const { return dx_; }
  double dt() const { return dt_; }
  double t_max() const { return t_max_; }

  double x(int i) const { return -half_length_ + i * dx_; }
  // Index of -x(i) on the periodic lattice.
  int mirror_index(int i) const { return i == 0 ? 0 : n_ - i; }

  // Largest omega whose soliton width passes the resolution guard
  // pi/dx > 8*sqrt(omega).
  double omega_max() const;

  const RealArray& xs() const { return xs_; }
  // Fourier wavenumbers in FFT ordering (0, pi/L, ..., -pi/L).
  const RealArray& ks() const { return ks_; }

  bool operator==(const Grid& other) const {
    return n_ == other.n_ && half_length_ == other.half_length_;
  }
  bool operator!=(const Grid& other) const { return !(*this == other); }

  // In-place unnormalized forward DFT / normalized inverse DFT.
  void fft(ComplexArray& data) const;
  void ifft(ComplexArray& data) const;

  // Spectral d/dx and d^2/dx^2 of a periodic field.
  ComplexArray derivative(const ComplexArray& f, int order = 1) const;

  // Rectangle-rule integral over [-L, L) (spectrally accurate for smooth
  // periodic integrands).
  Complex integrate(const ComplexArray& f) const { return f.sum() * dx_; }
  double integrate(const RealArray& f) const { return f.sum() * dx_; }

  // <x> = sqrt(1+x^2) raised to the power s, evaluated on the lattice.
  RealArray bracket_x_pow(double s) const;

 private:
  double half_length_;
  int n_;
  double dx_;
  double dt_;
  double t_max_;
  RealArray xs_;
  RealArray ks_;
};

}  // namespace nlslab
