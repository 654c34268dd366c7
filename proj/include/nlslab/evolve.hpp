#pragma once

#include <optional>
#include <vector>

#include "nlslab/modulation.hpp"

namespace nlslab {

enum class RunStatus { Running, Converged, EscapedUp, EscapedDown, BlowUp, Wrapped };

const char* to_string(RunStatus s);

// One tracked decomposition along a trajectory.
struct TrackSample {
  double t = 0.0;
  double omega = 0.0;
  double gamma_total = 0.0;  // total phase of the ansatz at time t
  double gamma = 0.0;        // gamma_total - integral of omega
  double z_plus = 0.0;
  double z_minus = 0.0;
  double fc_h1 = 0.0;
  double fc_weighted_l2 = 0.0;  // ||<x>^{-2} f_c||_2
  double mass = 0.0;
  double energy = 0.0;
  double r_h1 = 0.0;
  double r_sup = 0.0;
  double r_w12p = 0.0;
};

// Discrete-time approximations of the Z-norm components accumulated over a
// tracked run.
struct NormAccumulators {
  double r_l4t_linf = 0.0;     // ||R||_{L4_t L^inf_x}
  double r_lqt_w12p = 0.0;     // ||R||_{Lq_t W^{1,2p}}, q = 4p/(p-1)
  double fc_l2t_weighted = 0.0;  // ||<x>^{-2} f_c||_{L2_t L2_x}
  double r_linf_h1 = 0.0;      // sup_t ||R||_{H1}
};

struct Trajectory {
  RunStatus status = RunStatus::Running;
  double t_end = 0.0;
  std::vector<TrackSample> samples;
  NormAccumulators norms;
  double mass0 = 0.0, energy0 = 0.0;
  double mass_drift = 0.0, energy_drift = 0.0;  // relative, over the run
  // Optional field history (scalar u at sample times) for scattering fits.
  std::vector<ComplexArray> fields;
  std::vector<double> field_times;
  std::string note;
};

struct EvolveOptions {
  bool track = true;
  double track_dt = 0.1;
  double eps = 0.02;            // escape threshold scale: |z+| > 10 eps
  double escape_factor = 10.0;
  bool store_fields = false;
  double blowup_phase = 2.0 * M_PI;  // nonlinear phase per step declaring blow-up
  double wrap_mass_fraction = 1e-4;  // outer-10% mass monitor
  double omega_guess = 1.0;
};

class Evolver {
 public:
  Evolver(double p, const Grid& grid);

  // One Strang split step of i u_t + u_xx + |u|^{p-1} u = 0; dt may be
  // negative (the scheme is time-reversible). Throws NumericalError on
  // non-finite values.
  ComplexArray step(const ComplexArray& u, double dt) const;

  double mass(const ComplexArray& u) const;
  double energy(const ComplexArray& u) const;

  // Integrates to T (in units of grid.dt steps), decomposing every track_dt
  // when track is set. mod must outlive the call and share the grid.
  Trajectory evolve_and_track(const ComplexArray& u0, double T, const EvolveOptions& opts,
                              const Modulation* mod) const;

  const Grid& grid() const { return grid_; }
  double p() const { return p_; }

 private:
  double p_;
  Grid grid_;
  mutable ComplexArray lin_mult_;  // cached linear multiplier
  mutable double lin_mult_dt_ = 0.0;
};

}  // namespace nlslab
