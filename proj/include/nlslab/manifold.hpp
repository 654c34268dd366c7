#pragma once

#include "nlslab/evolve.hpp"

namespace nlslab {

// Parameters of an invariant-set point: (omega(0), gamma(0), z_-(0), h0)
// with h0 in range P_c(omega0), sigma1 conj h0 = h0.
struct SeedData {
  double omega0 = 1.0;
  double gamma0 = 0.0;
  double omega_init = std::numeric_limits<double>::quiet_NaN();  // defaults to omega0
  double gamma_init = std::numeric_limits<double>::quiet_NaN();  // defaults to gamma0
  double z_minus0 = 0.0;
  VecField h0;
  double eps = 0.02;
  double c_alpha = 1.0;  // H1 bound constant for h0 (empirical knob)

  explicit SeedData(const Grid& g) : h0(g) {}

  double omega_start() const { return std::isfinite(omega_init) ? omega_init : omega0; }
  double gamma_start() const { return std::isfinite(gamma_init) ? gamma_init : gamma0; }

  // Checks the smallness hypotheses and the h0 symmetry/subspace membership.
  void validate(const Modulation& mod) const;
};

// Initial datum assembled from the seed plus an unstable coefficient a:
// U = e^{i sigma3 gamma} (Phi + (a + z_-(0) sigma1) xi + f_d + h0).
VecField assemble_initial(const Modulation& mod, const SeedData& seed, double a);

struct ShootOptions {
  double T = 12.0;
  double a_tol = 1e-12;
  int max_iter = 90;
  EvolveOptions evolve;
};

struct ShootResult {
  double a_star = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  int probes = 0;
  Trajectory trajectory;  // run at a_star
};

// Bisection on z_+(0) between opposite escape classifications.
ShootResult shoot(const Modulation& mod, const Evolver& evolver, const SeedData& seed,
                  double a_lo, double a_hi, const ShootOptions& opts);

// Time-discretized trajectory of the integral system.
struct DiscreteSystem {
  std::vector<double> t;
  std::vector<double> omega, gamma, z_plus, z_minus;
  std::vector<double> omega_dot, gamma_dot, ell;
  std::vector<VecField> f_c;
};

struct PicardOptions {
  double T = 8.0;
  double tau = 0.02;    // time quadrature step
  double theta = 0.5;   // outer damping
  double tol_inner = 1e-10;
  double tol_outer = 1e-9;
  int max_inner = 60;
  int max_outer = 200;
};

struct PicardResult {
  DiscreteSystem sys;
  double z_plus0 = 0.0;
  bool converged = false;            // outer loop reached tol_outer
  bool inner_converged = false;      // last inner sweep reached tol_inner
  int outer_iters = 0;
  int inner_sweeps = 0;
  std::vector<double> contraction_factors;  // per outer pass: max inner ratio
  std::vector<double> omega_residuals;      // outer residual history
  double tail_exp = 0.0;    // e^{-mu(omega0) T}
  double tail_forcing = 0.0;  // ||F|| at the final node
};

// Inner contraction on (z_+, z_-, gamma, f_c) under fixed omega(.), outer
// damped iteration on omega(.). Non-convergence is reported, not thrown.
PicardResult picard_solve(const Modulation& mod, const SeedData& seed, const PicardOptions& opts);

// Tail Duhamel integral int_t^T e^{-i(t-s)H} e^{-+ i int_s^t ell} P_pm F(s) ds
// for a given forcing sequence; exposed for direct-quadrature cross-checks.
std::vector<VecField> duhamel_tail(const SpectralData& sd, const std::vector<double>& t,
                                   const std::vector<VecField>& forcing,
                                   const std::vector<double>& ell);

// The hypersurface graph function at one hyperplane point: z_+(0) from the
// fixed point (or from shooting when solve_by_shooting is set).
double graph_value(const Modulation& mod, const SeedData& seed, const PicardOptions& opts);

// Per-coordinate relative discrepancies between the fixed point and a full
// PDE run from the reconstructed initial datum, over [0, T_compare].
struct PicardValidation {
  double err_omega = 0.0;
  double err_gamma = 0.0;
  double err_z_plus = 0.0;
  double err_z_minus = 0.0;
  RunStatus pde_status = RunStatus::Running;
};

PicardValidation validate_against_pde(const Modulation& mod, const Evolver& evolver,
                                      const SeedData& seed, const PicardResult& result,
                                      double T_compare);

}  // namespace nlslab
