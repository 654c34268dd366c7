#pragma once

#include <string>

#include "nlslab/manifold.hpp"
#include "nlslab/rng.hpp"

namespace nlslab {

// Space-time norm ratios of the linear semigroup measured on random
// band-limited even conjugation-symmetric samples.
struct RatioReport {
  double max_ratio = 0.0;
  std::vector<double> ratios;
  int rejected = 0;
};

// ||e^{-itH} f||_{L4_t L^inf_x} / ||f||_{H1} over [0, T] for one field;
// refuses fields with no continuous-spectrum content.
double strichartz_ratio(const SpectralData& sd, const VecField& f, double T, double dt_sample);

// ||<x>^{-2} e^{-itH} P_c f||_{L2_t L2_x} / ||f||_{L2}.
double local_decay_ratio(const SpectralData& sd, const VecField& f, double T, double dt_sample);

RatioReport strichartz_constant(double p, double omega, const Grid& grid, int sample_count,
                                uint64_t seed, double T = 50.0, double dt_sample = 0.1);
RatioReport local_decay_constant(double p, double omega, const Grid& grid, int sample_count,
                                 uint64_t seed, double T = 50.0, double dt_sample = 0.1);

// Retarded ([0,t]) and advanced ([t,T]) Duhamel maps on localized forcings:
// output L2_t H^{k,-2} against input L2_t H^{k,2}, k = 0 and 1.
struct DuhamelReport {
  double retarded_k0 = 0.0, advanced_k0 = 0.0;
  double retarded_k1 = 0.0, advanced_k1 = 0.0;
};

DuhamelReport duhamel_norm_check(double p, double omega, const Grid& grid, int sample_count,
                                 uint64_t seed, double T = 20.0, double dt_sample = 0.05);

// Late-time comparison of the phase-corrected remainder with a free flow.
struct ScatterFit {
  double omega_inf = 0.0;
  double gamma_inf = 0.0;
  double omega_cauchy = 0.0;  // |omega(T2) - omega(T2/2)|
  ComplexArray r_inf;
  double r_inf_h1 = 0.0;
  double r_inf_l2 = 0.0;
  std::vector<double> times;
  std::vector<double> err_l2;
  std::vector<double> err_h1;
};

// Requires a Converged trajectory with stored fields and T2 - T1 >= 5/omega0.
ScatterFit scattering_fit(const Modulation& mod, const Trajectory& traj, double T1, double T2);

// Free Schroedinger flow e^{it d^2/dx^2} on the periodic lattice.
ComplexArray free_flow(const Grid& grid, double t, const ComplexArray& u);

// Merges every run-summary JSON under dir into one table (CSV + JSON);
// deterministic under file order, idempotent. Returns the row count.
int aggregate_reports(const std::string& dir, const std::string& out_csv,
                      const std::string& out_json);

}  // namespace nlslab
