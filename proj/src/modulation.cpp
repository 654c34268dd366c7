#include "nlslab/modulation.hpp"

#include <cmath>
#include <sstream>

namespace nlslab {

namespace {
const Complex kI(0.0, 1.0);
}

ComplexArray nonlinear_remainder(const ComplexArray& r, const ComplexArray& rbar,
                                 const RealArray& phi, double p) {
  const double cp = 0.5 * (p + 1.0), cm = 0.5 * (p - 1.0);
  ComplexArray w = (phi.cast<Complex>() + r) * (phi.cast<Complex>() + rbar);
  ComplexArray amp = w.pow(0.5 * (p - 1.0));
  RealArray phi_pm1 = phi.pow(p - 1.0);
  return amp * (phi.cast<Complex>() + r) - (phi * phi_pm1).cast<Complex>() -
         cp * phi_pm1 * r - cm * phi_pm1 * rbar;
}

Modulation::Modulation(double p, double omega0, const Grid& grid, double alpha)
    : p_(p), omega0_(omega0), alpha_(alpha), grid_(grid), sd0_(spectral(p, omega0, grid)) {}

std::shared_ptr<const OmegaFrame> Modulation::build_frame(double omega) const {
  auto fr = std::make_shared<OmegaFrame>(grid_);
  fr->omega = omega;
  fr->mu = omega * mu1_of(p_);
  SolitonParams params{omega, 0.0, p_, alpha_};
  fr->phi = phi_field(params, grid_);
  fr->dphi = dphi_domega_field(params, grid_);
  fr->d2phi = d2phi_domega2_field(params, grid_);
  fr->phi_pm1 = phi_pm1_profile(p_, omega, grid_);
  xi_and_dxi(p_, omega, grid_, fr->xi, fr->dxi);
  fr->sigma1_xi = fr->xi.sigma1();
  fr->sigma1_dxi = fr->dxi.sigma1();
  fr->lambda1 = (pair(fr->xi, fr->xi.sigma3()) / kI).real();
  fr->d1 = -1.0 / fr->lambda1;
  fr->d_mass = pair(fr->dphi, fr->phi).real();

  // Lemma-2.4 completion: coefficients c on the omega0 discrete basis solve
  // sum_i c_i pair(b_i(omega0), sigma3 t_j(omega)) = -pair(f_c, sigma3 t_j(omega)).
  const std::array<VecField, 4> target{fr->phi.sigma3(), fr->dphi, fr->xi, fr->sigma1_xi};
  Eigen::Matrix4cd a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = pair(sd0_->pd_basis[i], target[j].sigma3());
  Eigen::FullPivLU<Eigen::Matrix4cd> lu(a.transpose());
  if (lu.isInvertible() && lu.rcond() > 1e-10) {
    fr->fd_solve = lu.inverse();
    fr->fd_solve_ok = true;
  }
  return fr;
}

const OmegaFrame& Modulation::frame(double omega) const {
  std::lock_guard<std::mutex> lock(cache_mu_);
  auto it = frames_.find(omega);
  if (it != frames_.end()) return *it->second;
  auto fr = build_frame(omega);
  frames_.emplace(omega, fr);
  frame_order_.push_back(omega);
  while (frame_order_.size() > frame_capacity_) {
    frames_.erase(frame_order_.front());
    frame_order_.pop_front();
  }
  return *frames_[omega];
}

void Modulation::set_frame_cache_capacity(size_t cap) const {
  std::lock_guard<std::mutex> lock(cache_mu_);
  frame_capacity_ = cap;
}

VecField Modulation::big_N(const VecField& R, const OmegaFrame& fr) const {
  RealArray phi = fr.phi.a.real();
  ComplexArray n = nonlinear_remainder(R.a, R.b, phi, p_);
  ComplexArray nbar = nonlinear_remainder(R.b, R.a, phi, p_);
  return VecField(grid_, std::move(n), ComplexArray(-nbar));
}

ModState Modulation::decompose(const VecField& U, double omega_guess, double gamma_guess) const {
  if (U.grid != grid_) throw GridMismatchError();
  double omega = omega_guess;
  double gamma = gamma_guess;
  if (!std::isfinite(gamma)) {
    // phase of the overlap of phi with the first component
    Complex overlap = 0.0;
    SolitonParams params{omega, 0.0, p_, alpha_};
    VecField phi = phi_field(params, grid_);
    overlap = grid_.integrate(ComplexArray(phi.a * U.a));
    gamma = std::arg(overlap);
  }

  const double tol = 1e-12 * (1.0 + U.l2_norm() * U.l2_norm());
  bool converged = false;
  for (int iter = 0; iter < 25; ++iter) {
    SolitonParams params{omega, 0.0, p_, alpha_};
    VecField phi = phi_field(params, grid_);
    VecField dphi = dphi_domega_field(params, grid_);
    VecField d2phi = d2phi_domega2_field(params, grid_);
    VecField R = U.gauge(-gamma);
    R -= phi;

    const Complex c1 = pair(R, phi);
    const Complex c2 = pair(R, dphi.sigma3()) / kI;
    if (std::abs(c1) + std::abs(c2) < tol) {
      converged = true;
      break;
    }

    const double d_mass = pair(dphi, phi).real();
    const Complex pr_dphi = pair(R, dphi);
    const Complex pr_s3r_phi = pair(R.sigma3(), phi);
    const Complex pr_d2 = pair(R, d2phi.sigma3());
    Eigen::Matrix2d J;
    Eigen::Vector2d c(c1.real(), c2.real());
    J(0, 0) = (-d_mass + pr_dphi).real();
    J(0, 1) = (-kI * pr_s3r_phi).real();
    J(1, 0) = (pr_d2 / kI).real();
    J(1, 1) = -(pr_dphi.real() + d_mass);
    const double det = J.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-14 * d_mass * d_mass) {
      throw ModulationBreakdownError("singular constraint Jacobian in decompose");
    }
    Eigen::Vector2d step = J.partialPivLu().solve(c);
    // trust region on omega
    if (std::abs(step[0]) > 0.2 * omega) step *= 0.2 * omega / std::abs(step[0]);
    omega -= step[0];
    gamma -= step[1];
    if (omega <= alpha_ || omega >= 1.0 / alpha_) {
      throw NotNearManifoldError("omega left the admissible window during decompose");
    }
  }
  if (!converged) {
    throw NotNearManifoldError("constraint Newton iteration did not converge in 25 steps");
  }

  const OmegaFrame& fr = frame(omega);
  VecField R = U.gauge(-gamma);
  R -= fr.phi;

  ModState s(grid_);
  s.omega = omega;
  s.gamma = gamma;
  s.omega0 = omega0_;
  const Complex zp = pair(R, fr.xi.sigma3()) / (kI * fr.lambda1);
  const Complex zm = pair(R, fr.sigma1_xi.sigma3()) / (-kI * fr.lambda1);
  s.z_plus = zp.real();
  s.z_minus = zm.real();
  VecField f = R;
  f -= Complex(s.z_plus, 0.0) * fr.xi;
  f -= Complex(s.z_minus, 0.0) * fr.sigma1_xi;
  s.f_d = sd0_->project_d(f);
  s.f_c = f;
  s.f_c -= s.f_d;
  return s;
}

VecField Modulation::remainder_of(const ModState& s) const {
  const OmegaFrame& fr = frame(s.omega);
  VecField R = Complex(s.z_plus, 0.0) * fr.xi;
  R += Complex(s.z_minus, 0.0) * fr.sigma1_xi;
  R += s.f_d;
  R += s.f_c;
  return R;
}

VecField Modulation::reconstruct(const ModState& s) const {
  const OmegaFrame& fr = frame(s.omega);
  VecField U = remainder_of(s);
  U += fr.phi;
  return U.gauge(s.gamma);
}

ModRates Modulation::rates(const ModState& s) const {
  const OmegaFrame& fr = frame(s.omega);
  VecField R = remainder_of(s);
  VecField N = big_N(R, fr);

  // (omega_dot, gamma_dot) from d/dt of the two orthogonality constraints:
  //   [ A   B ] [ omega_dot ]   [ C ]
  //   [ E   D ] [ -gamma_dot] = [ F ]
  const double A = fr.d_mass - pair(R, fr.dphi).real();
  const double B = (pair(R.sigma3(), fr.phi) / kI).real();
  const double C = (pair(N, fr.phi) / kI).real();
  const double D = fr.d_mass + pair(R, fr.dphi).real();
  const double E = (pair(R, fr.d2phi.sigma3()) / kI).real();
  const double F = pair(N, fr.dphi.sigma3()).real();

  Eigen::Matrix2d m;
  m << A, B, E, D;
  const double det = m.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-10 * fr.d_mass * fr.d_mass) {
    throw ModulationBreakdownError(
        "modulation matrix is singular (d_mass too small or remainder too large)");
  }
  Eigen::Vector2d sol = m.partialPivLu().solve(Eigen::Vector2d(C, F));
  ModRates out;
  out.omega_dot = sol[0];
  out.gamma_dot = -sol[1];

  // Discrete mode equations. With W_pm the bracket against sigma3 sigma1^k xi,
  //   z+dot = +mu z+ + d1 [ i omega_dot <f, sigma3 dxi> + W_+ ]
  //   z-dot = -mu z- - d1 [ i omega_dot <f, sigma3 sigma1 dxi> + W_- ].
  VecField f = s.f_d;
  f += s.f_c;
  VecField bracket = R.sigma3();
  bracket *= Complex(out.gamma_dot, 0.0);
  bracket += N;
  VecField zeta_dxi = Complex(s.z_plus, 0.0) * fr.dxi;
  zeta_dxi += Complex(s.z_minus, 0.0) * fr.sigma1_dxi;
  bracket -= (kI * out.omega_dot) * zeta_dxi;

  const Complex zp_rhs = fr.d1 * (kI * out.omega_dot * pair(f, fr.dxi.sigma3()) +
                                  pair(bracket, fr.xi.sigma3()));
  const Complex zm_rhs = -fr.d1 * (kI * out.omega_dot * pair(f, fr.sigma1_dxi.sigma3()) +
                                   pair(bracket, fr.sigma1_xi.sigma3()));
  out.z_plus_dot = fr.mu * s.z_plus + zp_rhs.real();
  out.z_minus_dot = -fr.mu * s.z_minus + zm_rhs.real();
  return out;
}

VecField Modulation::complete_fd(const VecField& f_c, double omega) const {
  if (std::abs(omega - omega0_) > 0.1 * omega0_) {
    std::ostringstream msg;
    msg << "|omega - omega0| = " << std::abs(omega - omega0_)
        << " exceeds the completion window 0.1 omega0";
    throw WindowTooLargeError(msg.str());
  }
  const OmegaFrame& fr = frame(omega);
  if (!fr.fd_solve_ok) {
    throw WindowTooLargeError("completion system is singular at this omega");
  }
  const std::array<VecField, 4> target{fr.phi.sigma3(), fr.dphi, fr.xi, fr.sigma1_xi};
  Eigen::Vector4cd rhs;
  for (int j = 0; j < 4; ++j) rhs[j] = -pair(f_c, target[j].sigma3());
  const Eigen::Vector4cd coeff = fr.fd_solve * rhs;
  VecField f_d = VecField::zero(grid_);
  for (int i = 0; i < 4; ++i) f_d += coeff[i] * sd0_->pd_basis[i];
  return f_d;
}

}  // namespace nlslab
