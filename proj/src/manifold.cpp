#include "nlslab/manifold.hpp"

#include <cmath>
#include <sstream>

namespace nlslab {

namespace {

const Complex kI(0.0, 1.0);

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

std::vector<double> cumtrapz(const std::vector<double>& t, const std::vector<double>& v) {
  std::vector<double> out(t.size(), 0.0);
  for (size_t j = 1; j < t.size(); ++j) {
    out[j] = out[j - 1] + 0.5 * (t[j] - t[j - 1]) * (v[j] + v[j - 1]);
  }
  return out;
}

// Tail integral coefficients int_t^T e^{-i(t-s)(lambda branch)} e^{-+i(Lam_t - Lam_s)} a(s) ds
// by right-cumulative trapezoid in s.
PcBatch tail_coeffs(const PcBatch& forcing, const MatrixXcd& phase, const std::vector<double>& t,
                    const std::vector<double>& lam_int) {
  const int m = static_cast<int>(forcing.plus.rows());
  const int mt = static_cast<int>(t.size());
  PcBatch out;
  out.plus.resize(m, mt);
  out.minus.resize(m, mt);

  MatrixXcd bp(m, mt), bm(m, mt);
  for (int j = 0; j < mt; ++j) {
    const Complex ep = std::exp(kI * lam_int[j]);  // e^{+i Lam_s}
    bp.col(j) = forcing.plus.col(j).array() * phase.col(j).conjugate().array() * ep;
    bm.col(j) = forcing.minus.col(j).array() * phase.col(j).array() * std::conj(ep);
  }
  VectorXcd accp = VectorXcd::Zero(m), accm = VectorXcd::Zero(m);
  for (int j = mt - 1; j >= 0; --j) {
    if (j < mt - 1) {
      const double h = 0.5 * (t[j + 1] - t[j]);
      accp += h * (bp.col(j) + bp.col(j + 1));
      accm += h * (bm.col(j) + bm.col(j + 1));
    }
    const Complex ep = std::exp(-kI * lam_int[j]);  // e^{-i Lam_t}
    out.plus.col(j) = accp.array() * phase.col(j).array() * ep;
    out.minus.col(j) = accm.array() * phase.col(j).conjugate().array() * std::conj(ep);
  }
  return out;
}

}  // namespace

void SeedData::validate(const Modulation& mod) const {
  if (h0.grid != mod.grid()) throw GridMismatchError();
  const double scale =
      std::abs(z_minus0) + std::abs(gamma_start() - gamma0) + std::abs(omega_start() - omega0);
  if (scale >= eps / 5.0) {
    throw PreconditionError("seed offsets violate |z-(0)| + |gamma(0)-gamma0| + |omega(0)-omega0| < eps/5");
  }
  const double h0_h1 = weighted_norm(h0, 1, 0.0);
  if (h0_h1 >= c_alpha * eps) {
    std::ostringstream msg;
    msg << "||h0||_H1 = " << h0_h1 << " >= c(alpha) eps = " << c_alpha * eps;
    throw PreconditionError(msg.str());
  }
  if (h0_h1 > 0.0) {
    if (sigma1_conj_defect(h0) > 1e-10 * h0.sup_norm()) {
      throw PreconditionError("h0 must satisfy sigma1 conj h0 = h0");
    }
    VecField pd = mod.sd0().project_d(h0);
    if (pd.l2_norm() > 1e-8 * h0.l2_norm()) {
      throw PreconditionError("h0 must lie in the range of P_c(omega0)");
    }
  }
}

VecField assemble_initial(const Modulation& mod, const SeedData& seed, double a) {
  ModState s(mod.grid());
  s.omega = seed.omega_start();
  s.gamma = seed.gamma_start();
  s.omega0 = seed.omega0;
  s.z_plus = a;
  s.z_minus = seed.z_minus0;
  s.f_c = seed.h0;
  s.f_d = mod.complete_fd(seed.h0, s.omega);
  return mod.reconstruct(s);
}

ShootResult shoot(const Modulation& mod, const Evolver& evolver, const SeedData& seed,
                  double a_lo, double a_hi, const ShootOptions& opts) {
  seed.validate(mod);
  if (!(a_lo < a_hi)) throw BadBracketError("empty bracket");

  ShootResult result;
  EvolveOptions eopts = opts.evolve;
  eopts.track = true;
  eopts.eps = seed.eps;
  eopts.omega_guess = seed.omega_start();
  EvolveOptions probe_opts = eopts;
  probe_opts.store_fields = false;

  auto classify = [&](double a, bool store) -> std::pair<int, Trajectory> {
    VecField u0 = assemble_initial(mod, seed, a);
    Trajectory traj = evolver.evolve_and_track(u0.a, opts.T, store ? eopts : probe_opts, &mod);
    ++result.probes;
    switch (traj.status) {
      case RunStatus::EscapedUp:
        return {+1, std::move(traj)};
      case RunStatus::EscapedDown:
        return {-1, std::move(traj)};
      case RunStatus::Converged:
      case RunStatus::Running:
        return {0, std::move(traj)};
      case RunStatus::Wrapped:
        throw InconclusiveError("trajectory wrapped before classification (enlarge the box)");
      case RunStatus::BlowUp:
        throw InconclusiveError("trajectory blew up before classification (shrink eps)");
    }
    return {0, std::move(traj)};
  };

  auto [s_lo, t_lo] = classify(a_lo, false);
  if (s_lo == 0) {
    result.a_star = a_lo;
    result.bracket_lo = result.bracket_hi = a_lo;
    auto [sf, tf] = classify(a_lo, true);
    result.trajectory = std::move(tf);
    return result;
  }
  auto [s_hi, t_hi] = classify(a_hi, false);
  if (s_hi == 0) {
    result.a_star = a_hi;
    result.bracket_lo = result.bracket_hi = a_hi;
    auto [sf, tf] = classify(a_hi, true);
    result.trajectory = std::move(tf);
    return result;
  }
  if (s_lo == s_hi) {
    throw BadBracketError("both bracket endpoints escape to the same side");
  }

  double lo = a_lo, hi = a_hi;
  double a_mid = 0.5 * (lo + hi);
  for (int it = 0; it < opts.max_iter; ++it) {
    a_mid = 0.5 * (lo + hi);
    const double width = hi - lo;
    const double floor_width =
        std::max(opts.a_tol, 4.0 * std::numeric_limits<double>::epsilon() *
                                 std::max({std::abs(lo), std::abs(hi), 1e-6}));
    if (width <= floor_width) break;
    auto [s_mid, t_mid] = classify(a_mid, false);
    if (s_mid == 0) break;  // survived the horizon inside the tube
    if (s_mid == s_lo) {
      lo = a_mid;
    } else {
      hi = a_mid;
    }
  }
  result.a_star = a_mid;
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  auto [sf, tf] = classify(a_mid, true);
  result.trajectory = std::move(tf);
  return result;
}

std::vector<VecField> duhamel_tail(const SpectralData& sd, const std::vector<double>& t,
                                   const std::vector<VecField>& forcing,
                                   const std::vector<double>& ell) {
  if (!sd.has_modes()) throw PreconditionError("duhamel_tail needs continuous-spectrum modes");
  PcBatch f = analyze_batch(sd, forcing);
  MatrixXcd phase = mode_phases(sd, t);
  std::vector<double> lam_int = cumtrapz(t, ell);
  PcBatch tail = tail_coeffs(f, phase, t, lam_int);
  return synthesize_batch(sd, tail.plus, tail.minus);
}

PicardResult picard_solve(const Modulation& mod, const SeedData& seed, const PicardOptions& opts) {
  seed.validate(mod);
  const Grid& grid = mod.grid();
  const double p = mod.p();
  const double omega0 = mod.omega0();
  auto sd = spectral_with_modes(p, omega0, grid);
  const double mu0 = omega0 * mu1_of(p);

  const int mt = static_cast<int>(std::llround(opts.T / opts.tau)) + 1;
  std::vector<double> t(mt);
  for (int j = 0; j < mt; ++j) t[j] = j * opts.tau;
  mod.set_frame_cache_capacity(2 * mt + 16);

  if (std::exp(-mu0 * opts.T) >= 1e-8) {
    throw PreconditionError("horizon too short: e^{-mu T} must be below 1e-8");
  }

  PicardResult res;
  res.tail_exp = std::exp(-mu0 * opts.T);

  // state of the iteration
  std::vector<double> omega(mt, seed.omega_start());
  std::vector<double> gamma(mt, seed.gamma_start());
  std::vector<double> zp(mt, 0.0), zm(mt, 0.0);
  std::vector<double> om_dot(mt, 0.0), ga_dot(mt, 0.0), ell(mt, 0.0);

  PcCoeffs h0c = sd->analyze(seed.h0);
  MatrixXcd phase = mode_phases(*sd, t);
  const int m_modes = static_cast<int>(sd->pc->lambda.size());

  // initial iterate: free evolution of h0, z_pm = 0, gamma = gamma(0)
  MatrixXcd cp(m_modes, mt), cm(m_modes, mt);
  {
    std::vector<double> ell0(mt, seed.omega_start() - omega0);
    std::vector<double> lam0 = cumtrapz(t, ell0);
    for (int j = 0; j < mt; ++j) {
      cp.col(j) = h0c.plus.array() * phase.col(j).array() * std::exp(-kI * lam0[j]);
      cm.col(j) = h0c.minus.array() * phase.col(j).conjugate().array() * std::exp(kI * lam0[j]);
    }
  }
  std::vector<VecField> fc = synthesize_batch(*sd, cp, cm);
  std::vector<VecField> forcing(static_cast<size_t>(mt), VecField(grid));

  double last_forcing_norm = 0.0;

  // --- main iteration ---------------------------------------------------
  std::vector<double> cap_zp(mt, 0.0), cap_zm(mt, 0.0);
  double prev_change = -1.0;
  int stagnant = 0;

  auto one_sweep = [&]() -> double {
    std::vector<VecField> pm_fc = synthesize_batch(*sd, cp, MatrixXcd(-cm));
    for (int j = 0; j < mt; ++j) {
      const OmegaFrame& fr = mod.frame(omega[j]);
      ModState st(grid);
      st.omega = omega[j];
      st.gamma = gamma[j];
      st.z_plus = zp[j];
      st.z_minus = zm[j];
      st.f_c = fc[j];
      st.f_d = mod.complete_fd(fc[j], omega[j]);
      st.omega0 = omega0;
      ModRates rates = mod.rates(st);
      om_dot[j] = rates.omega_dot;
      ga_dot[j] = rates.gamma_dot;
      ell[j] = omega[j] - omega0 + rates.gamma_dot;
      const double mu_j = omega[j] * mu1_of(p);
      cap_zp[j] = rates.z_plus_dot - mu_j * zp[j];
      cap_zm[j] = rates.z_minus_dot + mu_j * zm[j];

      VecField r = mod.remainder_of(st);
      VecField f = st.f_d;
      f += st.f_c;
      VecField zeta = Complex(zp[j], 0.0) * fr.xi;
      zeta += Complex(zm[j], 0.0) * fr.sigma1_xi;

      VecField big_f = zeta.sigma3();
      big_f *= Complex(rates.gamma_dot, 0.0);
      big_f += mod.big_N(r, fr);
      VecField pot = apply_potential(omega[j], p, f);
      pot -= apply_potential(omega0, p, f);
      big_f += pot;
      VecField s3fd = st.f_d.sigma3();
      s3fd *= Complex(ell[j], 0.0);
      big_f += s3fd;
      VecField s3fc = st.f_c.sigma3();
      s3fc -= pm_fc[j];
      s3fc *= Complex(ell[j], 0.0);
      big_f += s3fc;
      big_f += Complex(rates.gamma_dot, 0.0) * fr.phi.sigma3();
      big_f -= (kI * rates.omega_dot) * fr.dphi;
      big_f -= (kI * cap_zp[j]) * fr.xi;
      big_f -= (kI * cap_zm[j]) * fr.sigma1_xi;
      VecField zeta_dxi = Complex(zp[j], 0.0) * fr.dxi;
      zeta_dxi += Complex(zm[j], 0.0) * fr.sigma1_dxi;
      big_f -= (kI * rates.omega_dot) * zeta_dxi;
      forcing[j] = std::move(big_f);
    }
    last_forcing_norm = forcing.back().l2_norm();

    // z_+ backward with z_+(T) = 0; z_- forward from the seed value
    std::vector<double> zp_new(mt, 0.0), zm_new(mt, 0.0);
    for (int j = mt - 2; j >= 0; --j) {
      const double dmu = 0.5 * (t[j + 1] - t[j]) *
                         (omega[j] * mu1_of(p) + omega[j + 1] * mu1_of(p));
      const double decay = std::exp(-dmu);
      zp_new[j] =
          decay * zp_new[j + 1] - 0.5 * (t[j + 1] - t[j]) * (cap_zp[j] + decay * cap_zp[j + 1]);
    }
    zm_new[0] = seed.z_minus0;
    for (int j = 1; j < mt; ++j) {
      const double dmu =
          0.5 * (t[j] - t[j - 1]) * (omega[j] * mu1_of(p) + omega[j - 1] * mu1_of(p));
      const double decay = std::exp(-dmu);
      zm_new[j] =
          decay * zm_new[j - 1] + 0.5 * (t[j] - t[j - 1]) * (decay * cap_zm[j - 1] + cap_zm[j]);
    }
    std::vector<double> gamma_new = cumtrapz(t, ga_dot);
    for (int j = 0; j < mt; ++j) gamma_new[j] += seed.gamma_start();

    PcBatch f_coeff = analyze_batch(*sd, forcing);
    std::vector<double> lam_int = cumtrapz(t, ell);
    PcBatch tail = tail_coeffs(f_coeff, phase, t, lam_int);
    MatrixXcd cp_new(m_modes, mt), cm_new(m_modes, mt);
    for (int j = 0; j < mt; ++j) {
      cp_new.col(j) = h0c.plus.array() * phase.col(j).array() * std::exp(-kI * lam_int[j]) +
                      kI * tail.plus.col(j).array();
      cm_new.col(j) = h0c.minus.array() * phase.col(j).conjugate().array() *
                          std::exp(kI * lam_int[j]) +
                      kI * tail.minus.col(j).array();
    }
    std::vector<VecField> fc_new = synthesize_batch(*sd, cp_new, cm_new);

    double change = 0.0;
    for (int j = 0; j < mt; ++j) {
      change = std::max(change, std::abs(zp_new[j] - zp[j]));
      change = std::max(change, std::abs(zm_new[j] - zm[j]));
      change = std::max(change, std::abs(gamma_new[j] - gamma[j]));
      VecField d = fc_new[j];
      d -= fc[j];
      change = std::max(change, d.l2_norm());
    }
    zp = std::move(zp_new);
    zm = std::move(zm_new);
    gamma = std::move(gamma_new);
    cp = std::move(cp_new);
    cm = std::move(cm_new);
    fc = std::move(fc_new);
    return change;
  };

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    ++res.outer_iters;
    prev_change = -1.0;
    stagnant = 0;
    double last_ratio = 0.0;
    res.inner_converged = false;
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      ++res.inner_sweeps;
      const double change = one_sweep();
      if (prev_change > 0.0) {
        last_ratio = change / prev_change;
        if (last_ratio >= 1.0 && change > 100.0 * opts.tol_inner) {
          if (++stagnant >= 3) {
            throw NumericalError("inner iteration is not contracting (eps too large?)");
          }
        } else {
          stagnant = 0;
        }
      }
      prev_change = change;
      if (change < opts.tol_inner) {
        res.inner_converged = true;
        break;
      }
    }
    res.contraction_factors.push_back(last_ratio);

    // outer omega update (Lemma-5.8-style damped iteration)
    std::vector<double> om_target = cumtrapz(t, om_dot);
    double residual = 0.0;
    for (int j = 0; j < mt; ++j) {
      om_target[j] += seed.omega_start();
      residual = std::max(residual, std::abs(om_target[j] - omega[j]));
    }
    res.omega_residuals.push_back(residual);
    if (residual < opts.tol_outer) {
      res.converged = true;
      break;
    }
    for (int j = 0; j < mt; ++j) {
      omega[j] = (1.0 - opts.theta) * omega[j] + opts.theta * om_target[j];
    }
  }

  res.tail_forcing = last_forcing_norm;
  res.z_plus0 = zp.front();
  res.sys.t = t;
  res.sys.omega = omega;
  res.sys.gamma = gamma;
  res.sys.z_plus = zp;
  res.sys.z_minus = zm;
  res.sys.omega_dot = om_dot;
  res.sys.gamma_dot = ga_dot;
  res.sys.ell = ell;
  res.sys.f_c = fc;
  return res;
}

double graph_value(const Modulation& mod, const SeedData& seed, const PicardOptions& opts) {
  return picard_solve(mod, seed, opts).z_plus0;
}

PicardValidation validate_against_pde(const Modulation& mod, const Evolver& evolver,
                                      const SeedData& seed, const PicardResult& result,
                                      double T_compare) {
  const DiscreteSystem& sys = result.sys;
  ModState s0(mod.grid());
  s0.omega = sys.omega.front();
  s0.gamma = sys.gamma.front();
  s0.z_plus = sys.z_plus.front();
  s0.z_minus = sys.z_minus.front();
  s0.f_c = sys.f_c.front();
  s0.f_d = mod.complete_fd(sys.f_c.front(), sys.omega.front());
  s0.omega0 = mod.omega0();
  VecField u0 = mod.reconstruct(s0);

  const double tau = sys.t[1] - sys.t[0];
  EvolveOptions eopts;
  eopts.track = true;
  eopts.track_dt = tau;
  eopts.eps = seed.eps;
  eopts.omega_guess = sys.omega.front();
  Trajectory traj = evolver.evolve_and_track(u0.a, T_compare, eopts, &mod);

  PicardValidation v;
  v.pde_status = traj.status;
  double sup_zp = 0.0, sup_zm = 0.0, sup_gamma = 0.0;
  for (size_t j = 0; j < sys.t.size(); ++j) {
    if (sys.t[j] > T_compare) break;
    sup_zp = std::max(sup_zp, std::abs(sys.z_plus[j]));
    sup_zm = std::max(sup_zm, std::abs(sys.z_minus[j]));
    sup_gamma = std::max(sup_gamma, std::abs(sys.gamma[j]));
  }
  const double eps2 = seed.eps * seed.eps;
  const double den_zp = std::max(sup_zp, eps2);
  const double den_zm = std::max(sup_zm, eps2);
  const double den_gamma = std::max(sup_gamma, 1.0);

  for (const TrackSample& smp : traj.samples) {
    const double jf = smp.t / tau;
    const int j = static_cast<int>(std::llround(jf));
    if (j < 0 || j >= static_cast<int>(sys.t.size())) continue;
    if (std::abs(sys.t[j] - smp.t) > 1e-9 * std::max(1.0, smp.t)) continue;
    // gamma(t) tracked by the PDE is gamma_total - int omega; the integral
    // system carries the same object
    v.err_omega = std::max(v.err_omega, std::abs(smp.omega - sys.omega[j]) / mod.omega0());
    v.err_gamma = std::max(v.err_gamma, std::abs(smp.gamma - sys.gamma[j]) / den_gamma);
    v.err_z_plus = std::max(v.err_z_plus, std::abs(smp.z_plus - sys.z_plus[j]) / den_zp);
    v.err_z_minus = std::max(v.err_z_minus, std::abs(smp.z_minus - sys.z_minus[j]) / den_zm);
  }
  return v;
}

}  // namespace nlslab
