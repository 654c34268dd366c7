#include "nlslab/vec_field.hpp"

#include <cmath>

namespace nlslab {

namespace {
void check_same_grid(const VecField& f, const VecField& g) {
  if (f.grid != g.grid) throw GridMismatchError();
}
}  // namespace

VecField& VecField::operator+=(const VecField& o) {
  check_same_grid(*this, o);
  a += o.a;
  b += o.b;
  return *this;
}

VecField& VecField::operator-=(const VecField& o) {
  check_same_grid(*this, o);
  a -= o.a;
  b -= o.b;
  return *this;
}

VecField& VecField::operator*=(Complex c) {
  a *= c;
  b *= c;
  return *this;
}

VecField VecField::gauge(double gamma) const {
  const Complex ph = std::polar(1.0, gamma);
  return VecField(grid, ph * a, std::conj(ph) * b);
}

double VecField::l2_norm() const {
  return std::sqrt(grid.integrate(RealArray(a.abs2() + b.abs2())));
}

double VecField::sup_norm() const {
  return std::max(a.abs().maxCoeff(), b.abs().maxCoeff());
}

Complex pair(const VecField& f, const VecField& g) {
  check_same_grid(f, g);
  return f.grid.integrate(ComplexArray(f.a * g.a + f.b * g.b));
}

double weighted_norm_scalar(const Grid& g, const ComplexArray& u, int k, double s) {
  ComplexArray w = u;
  if (s != 0.0) w *= g.bracket_x_pow(s);
  double total = g.integrate(RealArray(w.abs2()));
  ComplexArray d = w;
  for (int j = 1; j <= k; ++j) {
    d = g.derivative(d, 1);
    total += g.integrate(RealArray(d.abs2()));
  }
  return std::sqrt(total);
}

double weighted_norm(const VecField& f, int k, double s) {
  const double na = weighted_norm_scalar(f.grid, f.a, k, s);
  const double nb = weighted_norm_scalar(f.grid, f.b, k, s);
  return std::sqrt(na * na + nb * nb);
}

double lp_norm_scalar(const Grid& g, const ComplexArray& u, double q) {
  return std::pow(g.integrate(RealArray(u.abs().pow(q))), 1.0 / q);
}

double w1q_norm_scalar(const Grid& g, const ComplexArray& u, double q) {
  const ComplexArray du = g.derivative(u, 1);
  const double nq = g.integrate(RealArray(u.abs().pow(q)));
  const double ndq = g.integrate(RealArray(du.abs().pow(q)));
  return std::pow(nq + ndq, 1.0 / q);
}

ComplexArray enforce_even_scalar(const Grid& g, const ComplexArray& u) {
  const int n = g.n();
  ComplexArray out(n);
  for (int i = 0; i < n; ++i) out[i] = 0.5 * (u[i] + u[g.mirror_index(i)]);
  return out;
}

VecField enforce_even(const VecField& f) {
  return VecField(f.grid, enforce_even_scalar(f.grid, f.a), enforce_even_scalar(f.grid, f.b));
}

double evenness_defect(const VecField& f) {
  VecField e = enforce_even(f);
  e -= f;
  return e.sup_norm();
}

double sigma1_conj_defect(const VecField& f) {
  VecField d = f.sigma1_conj();
  d -= f;
  return d.sup_norm();
}

}  // namespace nlslab
