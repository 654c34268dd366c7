#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "nlslab/linop.hpp"

namespace nlslab {

// Full coordinate system of a near-soliton state:
//   U = e^{i sigma3 gamma} (Phi_omega + R),
//   R = (z_plus + z_minus sigma1) xi(omega) + f_d + f_c,
// with f_c in range P_c(omega0) and f_d in L2_d(omega0).
struct ModState {
  double omega = 1.0;
  double gamma = 0.0;
  double z_plus = 0.0;
  double z_minus = 0.0;
  VecField f_c;
  VecField f_d;
  double omega0 = 1.0;

  explicit ModState(const Grid& g) : f_c(g), f_d(g) {}
};

struct ModRates {
  double omega_dot = 0.0;
  double gamma_dot = 0.0;
  double z_plus_dot = 0.0;
  double z_minus_dot = 0.0;
};

// Everything omega-dependent that the modulation formulas consume, built once
// per omega value and cached (trajectories revisit nearby omegas constantly).
struct OmegaFrame {
  double omega = 0.0;
  double mu = 0.0;
  double lambda1 = 0.0;
  double d1 = 0.0;
  double d_mass = 0.0;  // pair(dPhi, Phi)
  VecField phi, dphi, d2phi;
  VecField xi, dxi, sigma1_xi, sigma1_dxi;
  RealArray phi_pm1;
  Eigen::Matrix4cd fd_solve;  // solves the Lemma-2.4 completion system
  bool fd_solve_ok = false;

  explicit OmegaFrame(const Grid& g)
      : phi(g), dphi(g), d2phi(g), xi(g), dxi(g), sigma1_xi(g), sigma1_dxi(g) {}
};

// n(r, rbar) = |phi+r|^{p-1}(phi+r) - phi^p - (p+1)/2 phi^{p-1} r
//            - (p-1)/2 phi^{p-1} rbar; the O(r^2) remainder of the expansion.
ComplexArray nonlinear_remainder(const ComplexArray& r, const ComplexArray& rbar,
                                 const RealArray& phi, double p);

class Modulation {
 public:
  // omega0 is the reference frequency of the f_d + f_c splitting.
  Modulation(double p, double omega0, const Grid& grid, double alpha = kDefaultAlpha);

  double p() const { return p_; }
  double omega0() const { return omega0_; }
  const Grid& grid() const { return grid_; }
  const SpectralData& sd0() const { return *sd0_; }

  const OmegaFrame& frame(double omega) const;

  // N(R) = t(n, -conj n) evaluated against phi_omega.
  VecField big_N(const VecField& R, const OmegaFrame& fr) const;

  // Newton solve of the orthogonality constraints pair(R, Phi_omega) = 0,
  // pair(R, sigma3 dPhi_omega) = 0, then coordinate extraction. A non-finite
  // gamma_guess requests the phase of the overlap integral as the start.
  ModState decompose(const VecField& U, double omega_guess,
                     double gamma_guess = std::numeric_limits<double>::quiet_NaN()) const;

  VecField reconstruct(const ModState& s) const;

  // R = (z+ + z- sigma1) xi(omega) + f_d + f_c for the state.
  VecField remainder_of(const ModState& s) const;

  // Modulation equations: the 2x2 constraint-derivative system for
  // (omega_dot, gamma_dot), then the discrete mode equations for z_pm_dot.
  ModRates rates(const ModState& s) const;

  // The unique f_d in L2_d(omega0) with f_d + f_c in L2_c(omega);
  // requires |omega - omega0| <= 0.1 omega0.
  VecField complete_fd(const VecField& f_c, double omega) const;

  // Cache capacity for omega frames (the Picard solver raises it so every
  // time node keeps its frame across sweeps).
  void set_frame_cache_capacity(size_t cap) const;

 private:
  double p_;
  double omega0_;
  double alpha_;
  Grid grid_;
  std::shared_ptr<const SpectralData> sd0_;

  mutable std::mutex cache_mu_;
  mutable std::unordered_map<double, std::shared_ptr<const OmegaFrame>> frames_;
  mutable std::deque<double> frame_order_;
  mutable size_t frame_capacity_ = 48;

  std::shared_ptr<const OmegaFrame> build_frame(double omega) const;
};

}  // namespace nlslab
