#include "nlslab/evolve.hpp"

#include <cmath>

namespace nlslab {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Running: return "Running";
    case RunStatus::Converged: return "Converged";
    case RunStatus::EscapedUp: return "EscapedUp";
    case RunStatus::EscapedDown: return "EscapedDown";
    case RunStatus::BlowUp: return "BlowUp";
    case RunStatus::Wrapped: return "Wrapped";
  }
  return "Unknown";
}

Evolver::Evolver(double p, const Grid& grid) : p_(p), grid_(grid) {}

namespace {

// |u|^{p-1} from |u|^2, with a fast path for integer (p-1)/2.
RealArray amp_pow(const RealArray& abs2, double p) {
  const double e = 0.5 * (p - 1.0);
  double ip;
  if (std::modf(e, &ip) == 0.0 && ip >= 1.0 && ip <= 8.0) {
    RealArray out = abs2;
    for (int i = 1; i < static_cast<int>(ip); ++i) out *= abs2;
    return out;
  }
  return abs2.pow(e);
}

ComplexArray phase_rotate(const ComplexArray& u, const RealArray& theta) {
  return u * (theta.cos().cast<Complex>() + Complex(0.0, 1.0) * theta.sin().cast<Complex>());
}

}  // namespace

ComplexArray Evolver::step(const ComplexArray& u, double dt) const {
  const Complex I(0.0, 1.0);
  // half-step nonlinear phase
  ComplexArray v = phase_rotate(u, RealArray((0.5 * dt) * amp_pow(u.abs2(), p_)));
  // full linear step, spectral
  if (lin_mult_dt_ != dt || lin_mult_.size() != grid_.n()) {
    lin_mult_ = (-I * dt * grid_.ks().square().cast<Complex>()).exp();
    lin_mult_dt_ = dt;
  }
  grid_.fft(v);
  v *= lin_mult_;
  grid_.ifft(v);
  // half-step nonlinear phase
  v = phase_rotate(v, RealArray((0.5 * dt) * amp_pow(v.abs2(), p_)));
  if (!v.allFinite()) throw NumericalError("non-finite field after split step");
  return v;
}

double Evolver::mass(const ComplexArray& u) const { return grid_.integrate(RealArray(u.abs2())); }

double Evolver::energy(const ComplexArray& u) const {
  ComplexArray du = grid_.derivative(u, 1);
  const double kinetic = grid_.integrate(RealArray(du.abs2()));
  const double potential = grid_.integrate(RealArray(u.abs().pow(p_ + 1.0)));
  return kinetic - 2.0 / (p_ + 1.0) * potential;
}

namespace {

double outer_mass_fraction(const Grid& g, const ComplexArray& u) {
  const double edge = 0.9 * g.half_length();
  double outer = 0.0, total = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    const double m = std::norm(u[i]);
    total += m;
    if (std::abs(g.x(i)) > edge) outer += m;
  }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace

Trajectory Evolver::evolve_and_track(const ComplexArray& u0, double T, const EvolveOptions& opts,
                                     const Modulation* mod) const {
  if (opts.track && (mod == nullptr || mod->grid() != grid_)) {
    throw PreconditionError("tracking requires a modulation context on the same grid");
  }
  const double dt = grid_.dt();
  const int n_steps = static_cast<int>(std::llround(T / dt));
  const int track_every = std::max(1, static_cast<int>(std::llround(opts.track_dt / dt)));
  const double amp_blow = std::pow(opts.blowup_phase / dt, 1.0 / (p_ - 1.0));

  Trajectory traj;
  traj.mass0 = mass(u0);
  traj.energy0 = energy(u0);
  const double energy_scale = std::max(std::abs(traj.energy0), 1e-3);

  ComplexArray u = u0;
  double omega_prev = opts.omega_guess;
  double gamma_prev = std::numeric_limits<double>::quiet_NaN();
  double omega_integral = 0.0;

  // previous instantaneous values for the trapezoid accumulators
  double prev_t = 0.0, prev_sup4 = 0.0, prev_wq = 0.0, prev_fcw = 0.0;
  bool have_prev = false;
  const double q_exp = 4.0 * p_ / (p_ - 1.0);
  double acc_l4 = 0.0, acc_lq = 0.0, acc_fc = 0.0;

  auto sample_at = [&](double t) -> bool {
    if (!opts.track) return true;
    ModState s(grid_);
    try {
      s = mod->decompose(VecField::from_scalar(grid_, u), omega_prev, gamma_prev);
    } catch (const NumericalError&) {
      // decomposition failure is classified by the last unstable coefficient
      traj.status = (!traj.samples.empty() && traj.samples.back().z_plus < 0.0)
                        ? RunStatus::EscapedDown
                        : RunStatus::EscapedUp;
      traj.note = "decomposition failed at t = " + std::to_string(t);
      return false;
    }
    TrackSample smp;
    smp.t = t;
    smp.omega = s.omega;
    smp.gamma_total = s.gamma;
    if (!traj.samples.empty()) {
      omega_integral += 0.5 * (traj.samples.back().omega + s.omega) * (t - prev_t);
    }
    smp.gamma = s.gamma - omega_integral;
    smp.z_plus = s.z_plus;
    smp.z_minus = s.z_minus;
    smp.fc_h1 = weighted_norm(s.f_c, 1, 0.0);
    smp.fc_weighted_l2 = weighted_norm(s.f_c, 0, -2.0);
    smp.mass = mass(u);
    smp.energy = energy(u);
    VecField R = mod->remainder_of(s);
    smp.r_h1 = weighted_norm(R, 1, 0.0);
    smp.r_sup = R.sup_norm();
    smp.r_w12p = w1q_norm_scalar(grid_, R.a, 2.0 * p_);
    traj.samples.push_back(smp);

    // trapezoid accumulation of the Z-norm integrands
    const double sup4 = std::pow(smp.r_sup, 4.0);
    const double wq = std::pow(smp.r_w12p, q_exp);
    const double fcw = smp.fc_weighted_l2 * smp.fc_weighted_l2;
    if (have_prev) {
      const double h = t - prev_t;
      acc_l4 += 0.5 * h * (prev_sup4 + sup4);
      acc_lq += 0.5 * h * (prev_wq + wq);
      acc_fc += 0.5 * h * (prev_fcw + fcw);
    }
    prev_t = t;
    prev_sup4 = sup4;
    prev_wq = wq;
    prev_fcw = fcw;
    have_prev = true;
    traj.norms.r_linf_h1 = std::max(traj.norms.r_linf_h1, smp.r_h1);

    traj.mass_drift = std::max(traj.mass_drift, std::abs(smp.mass - traj.mass0) / traj.mass0);
    traj.energy_drift =
        std::max(traj.energy_drift, std::abs(smp.energy - traj.energy0) / energy_scale);

    omega_prev = s.omega;
    gamma_prev = s.gamma;

    if (opts.store_fields) {
      traj.fields.push_back(u);
      traj.field_times.push_back(t);
    }

    if (std::abs(s.z_plus) > opts.escape_factor * opts.eps) {
      traj.status = s.z_plus > 0.0 ? RunStatus::EscapedUp : RunStatus::EscapedDown;
      return false;
    }
    return true;
  };

  if (!sample_at(0.0)) {
    traj.t_end = 0.0;
    return traj;
  }

  for (int step_i = 1; step_i <= n_steps; ++step_i) {
    const double t = step_i * dt;
    try {
      u = step(u, dt);
    } catch (const NumericalError&) {
      traj.status = RunStatus::BlowUp;
      traj.t_end = t;
      return traj;
    }
    if (u.abs().maxCoeff() > amp_blow) {
      traj.status = RunStatus::BlowUp;
      traj.t_end = t;
      traj.note = "amplitude exceeded the resolvable bound";
      return traj;
    }
    if (step_i % track_every == 0 || step_i == n_steps) {
      if (outer_mass_fraction(grid_, u) > opts.wrap_mass_fraction) {
        traj.status = RunStatus::Wrapped;
        traj.t_end = t;
        return traj;
      }
      if (!sample_at(t)) {
        traj.t_end = t;
        return traj;
      }
    }
  }

  traj.norms.r_l4t_linf = std::pow(acc_l4, 0.25);
  traj.norms.r_lqt_w12p = std::pow(acc_lq, 1.0 / q_exp);
  traj.norms.fc_l2t_weighted = std::sqrt(acc_fc);
  traj.status = opts.track ? RunStatus::Converged : RunStatus::Running;
  traj.t_end = n_steps * dt;
  return traj;
}

}  // namespace nlslab
