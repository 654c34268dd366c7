#pragma once

#include "nlslab/grid.hpp"

namespace nlslab {

// Two-component complex field t(a, b) on a Grid. Houses the vectorized
// remainder R = t(r, conj r), the soliton pair Phi = t(phi, phi), the
// discrete eigenvector xi, and the dispersive components f, f_c, f_d, h0.
// Value semantics; no interior mutation is shared between copies.
struct VecField {
  Grid grid;
  ComplexArray a;
  ComplexArray b;

  explicit VecField(const Grid& g) : grid(g), a(ComplexArray::Zero(g.n())), b(ComplexArray::Zero(g.n())) {}
  VecField(const Grid& g, ComplexArray av, ComplexArray bv)
      : grid(g), a(std::move(av)), b(std::move(bv)) {}

  static VecField zero(const Grid& g) { return VecField(g); }
  // t(u, conj u) lift of a scalar field.
  static VecField from_scalar(const Grid& g, const ComplexArray& u) {
    return VecField(g, u, u.conjugate());
  }

  int n() const { return grid.n(); }

  VecField& operator+=(const VecField& o);
  VecField& operator-=(const VecField& o);
  VecField& operator*=(Complex c);

  friend VecField operator+(VecField f, const VecField& g) { return f += g; }
  friend VecField operator-(VecField f, const VecField& g) { return f -= g; }
  friend VecField operator*(Complex c, VecField f) { return f *= c; }
  friend VecField operator*(double c, VecField f) { return f *= Complex(c, 0.0); }

  VecField sigma1() const { return VecField(grid, b, a); }
  VecField sigma2() const {
    const Complex I(0.0, 1.0);
    return VecField(grid, I * b, -I * a);
  }
  VecField sigma3() const { return VecField(grid, a, -b); }
  VecField conj() const { return VecField(grid, a.conjugate(), b.conjugate()); }
  // sigma1 . conj, the symmetry fixing z_pm real.
  VecField sigma1_conj() const { return VecField(grid, b.conjugate(), a.conjugate()); }

  // e^{i sigma3 gamma}: (a, b) -> (e^{i gamma} a, e^{-i gamma} b).
  VecField gauge(double gamma) const;

  // Pointwise multiplication of both components by a real profile.
  VecField scaled_by(const RealArray& w) const { return VecField(grid, a * w, b * w); }
  // x * f(x).
  VecField mul_x() const { return scaled_by(grid.xs()); }

  double l2_norm() const;
  double sup_norm() const;
};

// Bilinear pairing <f,g> = integral of t(f) g dx; no conjugation.
// Throws GridMismatchError when the grids differ.
Complex pair(const VecField& f, const VecField& g);

// || <x>^s f ||_{H^k} with spectral derivatives and pointwise weight,
// using ||g||_{H^k}^2 = sum_{j<=k} ||д^j g||_2^2 over both components.
double weighted_norm(const VecField& f, int k, double s);

// Scalar-field variants used by the evolve/diagnostics modules.
double weighted_norm_scalar(const Grid& g, const ComplexArray& u, int k, double s);
double lp_norm_scalar(const Grid& g, const ComplexArray& u, double q);
// W^{1,q} norm (||u||_q^q + ||u'||_q^q)^{1/q}.
double w1q_norm_scalar(const Grid& g, const ComplexArray& u, double q);

// Even part (f(x)+f(-x))/2 per component; idempotent.
VecField enforce_even(const VecField& f);
ComplexArray enforce_even_scalar(const Grid& g, const ComplexArray& u);

// sup |f - even part of f|, a diagnostic for the evenness invariant.
double evenness_defect(const VecField& f);
// sup |f - sigma1 conj f|, the conjugation-symmetry defect.
double sigma1_conj_defect(const VecField& f);

}  // namespace nlslab
