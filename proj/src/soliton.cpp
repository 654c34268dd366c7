#include "nlslab/soliton.hpp"

#include <cmath>
#include <sstream>

namespace nlslab {

namespace {

void check_resolution(double omega, const Grid& grid) {
  const double nyquist = M_PI / grid.dx();
  if (nyquist <= 8.0 * std::sqrt(omega)) {
    std::ostringstream msg;
    msg << "grid cannot resolve soliton width: pi/dx = " << nyquist
        << " <= 8 sqrt(omega) = " << 8.0 * std::sqrt(omega);
    throw ResolutionError(msg.str());
  }
}

struct Shape {
  double A;     // amplitude
  double beta;  // sech argument scale
  double m;     // sech exponent
};

Shape shape_of(double p, double omega) {
  Shape s;
  s.m = 2.0 / (p - 1.0);
  s.beta = 0.5 * (p - 1.0) * std::sqrt(omega);
  s.A = std::pow(omega * (p + 1.0) / 2.0, 1.0 / (p - 1.0));
  return s;
}

}  // namespace

void SolitonParams::validate() const {
  if (p <= 5.0) throw PreconditionError("nonlinearity exponent must satisfy p > 5");
  if (alpha <= 0.0 || alpha >= 1.0) throw PreconditionError("alpha must lie in (0,1)");
  if (omega <= alpha || omega >= 1.0 / alpha) {
    std::ostringstream msg;
    msg << "omega = " << omega << " outside window (" << alpha << ", " << 1.0 / alpha << ")";
    throw PreconditionError(msg.str());
  }
}

double phi_value(double p, double omega, double x) {
  const Shape s = shape_of(p, omega);
  return s.A * std::pow(1.0 / std::cosh(s.beta * x), s.m);
}

double dphi_domega_value(double p, double omega, double x) {
  const Shape s = shape_of(p, omega);
  const double t = std::tanh(s.beta * x);
  return phi_value(p, omega, x) * (1.0 - s.beta * x * t) / ((p - 1.0) * omega);
}

double d2phi_domega2_value(double p, double omega, double x) {
  const Shape s = shape_of(p, omega);
  const double bx = s.beta * x;
  const double t = std::tanh(bx);
  const double S = (1.0 - bx * t) / ((p - 1.0) * omega);
  const double dS = -(bx * t + bx * bx * (1.0 - t * t)) / (2.0 * (p - 1.0) * omega * omega) -
                    (1.0 - bx * t) / ((p - 1.0) * omega * omega);
  return phi_value(p, omega, x) * (S * S + dS);
}

namespace {
template <typename F>
VecField both_components(const Grid& grid, F&& f) {
  ComplexArray v(grid.n());
  for (int i = 0; i < grid.n(); ++i) v[i] = f(grid.x(i));
  return VecField(grid, v, v);
}
}  // namespace

VecField phi_field(const SolitonParams& params, const Grid& grid) {
  params.validate();
  check_resolution(params.omega, grid);
  return both_components(grid, [&](double x) { return phi_value(params.p, params.omega, x); });
}

VecField dphi_domega_field(const SolitonParams& params, const Grid& grid) {
  params.validate();
  check_resolution(params.omega, grid);
  return both_components(grid,
                         [&](double x) { return dphi_domega_value(params.p, params.omega, x); });
}

VecField d2phi_domega2_field(const SolitonParams& params, const Grid& grid) {
  params.validate();
  check_resolution(params.omega, grid);
  return both_components(grid,
                         [&](double x) { return d2phi_domega2_value(params.p, params.omega, x); });
}

RealArray phi_pm1_profile(double p, double omega, const Grid& grid) {
  // phi^{p-1} = omega (p+1)/2 sech^2((p-1) sqrt(omega) x / 2)
  const Shape s = shape_of(p, omega);
  RealArray out(grid.n());
  for (int i = 0; i < grid.n(); ++i) {
    const double sech = 1.0 / std::cosh(s.beta * grid.x(i));
    out[i] = omega * (p + 1.0) / 2.0 * sech * sech;
  }
  return out;
}

MassCurve mass_curve(double omega, double p, const Grid& grid) {
  SolitonParams params{omega, 0.0, p};
  VecField phi = phi_field(params, grid);
  MassCurve mc;
  mc.mass = grid.integrate(RealArray(phi.a.abs2()));
  const double sigma = 2.0 / (p - 1.0) - 0.5;
  mc.d_mass = sigma * mc.mass / omega;
  return mc;
}

}  // namespace nlslab
