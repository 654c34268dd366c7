#pragma once

#include "nlslab/vec_field.hpp"

namespace nlslab {

// Default window parameter: omega must stay in (alpha, 1/alpha).
inline constexpr double kDefaultAlpha = 0.2;

struct SolitonParams {
  double omega = 1.0;
  double gamma = 0.0;
  double p = 7.0;
  double alpha = kDefaultAlpha;

  // Throws PreconditionError when p <= 5 or omega leaves the window.
  void validate() const;
};

// Closed-form ground state phi_omega(x) = A sech^{2/(p-1)}((p-1) sqrt(omega) x / 2)
// with A = (omega (p+1)/2)^{1/(p-1)}, the amplitude forced by
// -phi'' + omega phi - phi^p = 0 (gated by the residual tests).
double phi_value(double p, double omega, double x);
double dphi_domega_value(double p, double omega, double x);
double d2phi_domega2_value(double p, double omega, double x);

// Profile on a grid; throws ResolutionError when the resolution guard
// pi/dx > 8 sqrt(omega) fails. Both components equal phi.
VecField phi_field(const SolitonParams& params, const Grid& grid);
// Analytic omega-derivative, t(d phi, d phi).
VecField dphi_domega_field(const SolitonParams& params, const Grid& grid);
VecField d2phi_domega2_field(const SolitonParams& params, const Grid& grid);

// phi_omega^{p-1} on the grid, the potential profile of the linearization.
RealArray phi_pm1_profile(double p, double omega, const Grid& grid);

struct MassCurve {
  double mass = 0.0;    // ||phi_omega||_2^2 by quadrature
  double d_mass = 0.0;  // analytic d/domega via the scaling law
};

// Scaling law: mass(omega) = omega^{2/(p-1) - 1/2} mass(1), so
// d_mass = (2/(p-1) - 1/2) mass / omega; negative for p > 5.
MassCurve mass_curve(double omega, double p, const Grid& grid);

}  // namespace nlslab
