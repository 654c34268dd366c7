#include "nlslab/linop.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace nlslab {

namespace {

constexpr double kGapFraction = 0.5;  // |lambda| >= omega/2 classifies as continuous

// ----------------------------------------------------------------------------
// Half-lattice machinery. Even fields are determined by indices 0..N/2
// (x in [-L, 0]); interior nodes carry weight 2 in full-domain integrals.

struct HalfGrid {
  int n_half;
  RealArray weights;  // dx * {1, 2, ..., 2, 1}
  explicit HalfGrid(const Grid& g) : n_half(g.n() / 2 + 1), weights(n_half) {
    weights.setConstant(2.0 * g.dx());
    weights[0] = g.dx();
    weights[n_half - 1] = g.dx();
  }
};

Eigen::VectorXd restrict_half(const Grid& g, const RealArray& full) {
  const int nh = g.n() / 2 + 1;
  Eigen::VectorXd out(nh);
  for (int i = 0; i < nh; ++i) out[i] = full[i];
  return out;
}

ComplexArray extend_even(const Grid& g, const Eigen::VectorXd& re, const Eigen::VectorXd& im) {
  ComplexArray out(g.n());
  for (int i = 0; i < g.n(); ++i) {
    const int j = std::min(i, g.n() - i);
    out[i] = Complex(re[j], im[j]);
  }
  return out;
}

// Even-sector spectral second derivative as a dense n_half x n_half matrix.
Eigen::MatrixXd build_d2_even(const Grid& g) {
  const int nh = g.n() / 2 + 1;
  Eigen::MatrixXd d2(nh, nh);
  ComplexArray col(g.n());
  for (int j = 0; j < nh; ++j) {
    col.setZero();
    col[j] = 1.0;
    if (j != 0 && j != nh - 1) col[g.n() - j] = 1.0;
    ComplexArray dd = g.derivative(col, 2);
    for (int i = 0; i < nh; ++i) d2(i, j) = dd[i].real();
  }
  return d2;
}

struct EvenOperators {
  Eigen::MatrixXd l_plus;   // -d2 + omega - p phi^{p-1}
  Eigen::MatrixXd l_minus;  // -d2 + omega - phi^{p-1}
};

EvenOperators build_even_operators(double p, double omega, const Grid& g) {
  const int nh = g.n() / 2 + 1;
  Eigen::MatrixXd d2 = build_d2_even(g);
  RealArray pot = phi_pm1_profile(p, omega, g);
  EvenOperators ops{-d2, -d2};
  for (int i = 0; i < nh; ++i) {
    ops.l_plus(i, i) += omega - p * pot[i];
    ops.l_minus(i, i) += omega - pot[i];
  }
  return ops;
}

// ----------------------------------------------------------------------------
// Dense eigensolve of the linearized block [[0, L-], [L+, 0]] acting on
// (g, h). Returns the xi mode (phase- and sign-normalized, unit L2 on the
// full lattice) and the positive-branch continuous modes.

struct DenseSolve {
  double mu = 0.0;
  Eigen::VectorXd xi_g;  // real part structure: a = (g + i h)/2
  Eigen::VectorXd xi_h;
  PcModes modes;
};

DenseSolve dense_eigensolve(double p, double omega, const Grid& grid) {
  const HalfGrid hg(grid);
  const int nh = hg.n_half;
  const int n2 = 2 * nh;
  EvenOperators ops = build_even_operators(p, omega, grid);

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n2, n2);
  B.topRightCorner(nh, nh) = ops.l_minus;
  B.bottomLeftCorner(nh, nh) = ops.l_plus;

  Eigen::VectorXd wr(n2), wi(n2);
  Eigen::MatrixXd vr(n2, n2);
  const int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n2, B.data(), n2, wr.data(),
                                 wi.data(), nullptr, n2, vr.data(), n2);
  if (info != 0) {
    std::ostringstream msg;
    msg << "dgeev failed with info = " << info;
    throw SpectralFailure(msg.str());
  }

  DenseSolve out;
  struct ContMode {
    double lambda;
    int col;
  };
  std::vector<ContMode> cont;
  int kernel_count = 0;
  bool found_xi = false;

  const double gap = kGapFraction * omega;
  for (int j = 0; j < n2; ++j) {
    const double norm_l = std::hypot(wr[j], wi[j]);
    if (wi[j] != 0.0) {
      // complex pair occupies columns j (v = vr_j + i vr_{j+1}) and j+1
      if (wi[j] < 0.0) continue;  // handled on the positive branch
      if (norm_l < gap) {
        kernel_count += 2;
        continue;
      }
      if (std::abs(wr[j]) > 1e-6 * std::abs(wi[j])) {
        std::ostringstream msg;
        msg << "unexpected complex eigenvalue " << wr[j] << " + " << wi[j]
            << "i off the imaginary axis (under-resolved grid?)";
        throw SpectralFailure(msg.str());
      }
      if (found_xi) throw SpectralFailure("multiple imaginary eigenvalue pairs found");
      found_xi = true;
      out.mu = wi[j];
      Eigen::VectorXcd vg(nh), vh(nh);
      for (int i = 0; i < nh; ++i) {
        vg[i] = Complex(vr(i, j), vr(i, j + 1));
        vh[i] = Complex(vr(nh + i, j), vr(nh + i, j + 1));
      }
      // rotate so that g is real and h imaginary (sigma1-conjugation gauge)
      int imax = 0;
      vg.cwiseAbs().maxCoeff(&imax);
      const Complex ph = std::conj(vg[imax]) / std::abs(vg[imax]);
      vg *= ph;
      vh *= ph;
      const double defect =
          std::max(vg.imag().cwiseAbs().maxCoeff(), vh.real().cwiseAbs().maxCoeff());
      if (defect > 1e-3 * vg.cwiseAbs().maxCoeff()) {
        throw SpectralFailure("discrete eigenvector does not satisfy the conjugation symmetry");
      }
      out.xi_g = vg.real();
      out.xi_h = vh.imag();
      continue;
    }
    // real eigenvalue
    if (std::abs(wr[j]) < gap) {
      ++kernel_count;
      continue;
    }
    if (wr[j] < 0.0) continue;  // negative branch synthesized from the positive one
    cont.push_back({wr[j], j});
  }

  if (!found_xi) {
    throw SpectralFailure("no eigenvalue found off the real axis (under-resolved grid?)");
  }
  if (kernel_count != 2) {
    std::ostringstream msg;
    msg << "expected a two-dimensional even-sector generalized kernel, found " << kernel_count
        << " eigenvalues inside the spectral gap";
    throw DegenerateSpectrumError(msg.str());
  }

  std::sort(cont.begin(), cont.end(),
            [](const ContMode& a, const ContMode& b) { return a.lambda < b.lambda; });

  const int m = static_cast<int>(cont.size());
  PcModes& pc = out.modes;
  pc.n_half = nh;
  pc.weights = hg.weights;
  pc.g_modes.resize(nh, m);
  pc.h_modes.resize(nh, m);
  pc.lambda.resize(m);
  pc.s_norm.resize(m);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd g = vr.col(cont[k].col).head(nh);
    Eigen::VectorXd h = vr.col(cont[k].col).tail(nh);
    const double scale = 1.0 / std::max(g.cwiseAbs().maxCoeff(), h.cwiseAbs().maxCoeff());
    g *= scale;
    h *= scale;
    const double s = (hg.weights * g.array() * h.array()).sum();
    const double gn = std::sqrt((hg.weights * g.array().square()).sum());
    const double hn = std::sqrt((hg.weights * h.array().square()).sum());
    if (std::abs(s) < 1e-10 * gn * hn) {
      std::ostringstream msg;
      msg << "degenerate sigma3-normalization for continuous mode lambda = " << cont[k].lambda;
      throw DegenerateSpectrumError(msg.str());
    }
    pc.g_modes.col(k) = g;
    pc.h_modes.col(k) = h;
    pc.lambda[k] = cont[k].lambda;
    pc.s_norm[k] = s;
  }
  return out;
}

// ----------------------------------------------------------------------------
// Scaling family: cosine series of xi(1, .) built once per p from the base
// diagonalization, then evaluated at sqrt(omega)-dilated arguments.

struct XiFamily {
  double p = 0.0;
  double mu1 = 0.0;
  double base_L = 0.0;
  Eigen::VectorXd k_modes;  // pi m / L_base
  Eigen::VectorXd cg;       // cosine coefficients of g
  Eigen::VectorXd ch;       // cosine coefficients of h
};

// Cosine coefficients of an even real half-lattice array.
Eigen::VectorXd cosine_series(const Grid& g, const Eigen::VectorXd& half) {
  ComplexArray full = extend_even(g, half, Eigen::VectorXd::Zero(half.size()));
  g.fft(full);
  const int nh = g.n() / 2 + 1;
  Eigen::VectorXd coeff(nh);
  for (int m = 0; m < nh; ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;  // e^{i pi m} grid-offset phase
    double c = sign * full[m].real() / g.n();
    coeff[m] = (m == 0 || m == nh - 1) ? c : 2.0 * c;
  }
  return coeff;
}

// Evaluates the (g, h) cosine series and their y-derivatives at y = s * x.
struct SeriesEval {
  Eigen::VectorXd g, h, dg, dh;
};

SeriesEval eval_series(const XiFamily& fam, double s, const RealArray& xs) {
  const int n = static_cast<int>(xs.size());
  const int K = static_cast<int>(fam.k_modes.size());
  SeriesEval out;
  out.g = Eigen::VectorXd::Zero(n);
  out.h = Eigen::VectorXd::Zero(n);
  out.dg = Eigen::VectorXd::Zero(n);
  out.dh = Eigen::VectorXd::Zero(n);
  // joint cos/sin recurrence in the mode index
  Eigen::ArrayXd theta = fam.k_modes[1] * s * xs;  // k step is uniform
  Eigen::ArrayXd c1 = theta.cos(), s1 = theta.sin();
  Eigen::ArrayXd C = Eigen::ArrayXd::Ones(n), S = Eigen::ArrayXd::Zero(n);
  for (int m = 0; m < K; ++m) {
    const double km = fam.k_modes[m];
    out.g.array() += fam.cg[m] * C;
    out.h.array() += fam.ch[m] * C;
    out.dg.array() -= fam.cg[m] * km * S;
    out.dh.array() -= fam.ch[m] * km * S;
    Eigen::ArrayXd Cn = C * c1 - S * s1;
    S = S * c1 + C * s1;
    C = Cn;
  }
  return out;
}

SpectralData assemble(double p, double omega, const Grid& grid, double mu,
                      const VecField& xi_in);

const XiFamily& xi_family(double p) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<XiFamily>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return *it->second;

  // Base dense solve at a moderate resolution, then two inverse-iteration
  // polish steps on a finer lattice to push the eigenpair to ~1e-11 residual.
  const double L = 32.0;
  Grid coarse(L, 512);
  DenseSolve base = dense_eigensolve(p, 1.0, coarse);

  auto fam = std::make_shared<XiFamily>();
  fam->p = p;
  fam->base_L = L;
  fam->mu1 = base.mu;
  {
    Grid fine(L, 1024);
    const HalfGrid hg(fine);
    // interpolate the coarse mode onto the fine lattice through its series
    XiFamily tmp;
    tmp.base_L = L;
    tmp.k_modes = Eigen::VectorXd::LinSpaced(257, 0.0, M_PI * 256 / L);
    tmp.cg = cosine_series(coarse, base.xi_g);
    tmp.ch = cosine_series(coarse, base.xi_h);
    RealArray half_x(hg.n_half);
    for (int i = 0; i < hg.n_half; ++i) half_x[i] = fine.x(i);
    SeriesEval ev = eval_series(tmp, 1.0, half_x);

    EvenOperators ops = build_even_operators(p, 1.0, fine);
    const int nh = hg.n_half;
    Eigen::VectorXcd z(2 * nh);
    for (int i = 0; i < nh; ++i) {
      z[i] = ev.g[i];
      z[nh + i] = Complex(0.0, ev.h[i]);
    }
    double mu_est = base.mu;
    Eigen::MatrixXcd C(2 * nh, 2 * nh);
    for (int iter = 0; iter < 3; ++iter) {
      C.setZero();
      C.topRightCorner(nh, nh) = ops.l_minus.cast<Complex>();
      C.bottomLeftCorner(nh, nh) = ops.l_plus.cast<Complex>();
      C.diagonal().array() -= Complex(0.0, mu_est);
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(C);
      z = lu.solve(z);
      z /= z.norm();
      // Rayleigh update of the shift
      Eigen::VectorXcd Bz(2 * nh);
      Bz.head(nh) = ops.l_minus * z.tail(nh);
      Bz.tail(nh) = ops.l_plus * z.head(nh);
      const Complex rq = z.dot(Bz);  // conjugating inner product
      mu_est = rq.imag();
    }
    // re-impose the conjugation gauge: g real, h imaginary
    Eigen::VectorXcd vg = z.head(nh), vh = z.tail(nh);
    int imax = 0;
    vg.cwiseAbs().maxCoeff(&imax);
    const Complex ph = std::conj(vg[imax]) / std::abs(vg[imax]);
    vg *= ph;
    vh *= ph;
    Eigen::VectorXd gr = vg.real(), hi = vh.imag();
    if (gr[nh - 1] < 0.0) {
      gr = -gr;
      hi = -hi;
    }
    fam->mu1 = mu_est;
    fam->k_modes = Eigen::VectorXd::LinSpaced(nh, 0.0, M_PI * (nh - 1) / L);
    fam->cg = cosine_series(fine, gr);
    fam->ch = cosine_series(fine, hi);
    // normalize to unit L2 on the base lattice
    VecField xi(fine, extend_even(fine, gr, hi) * 0.5,
                extend_even(fine, gr, (-hi).eval()) * 0.5);
    const double nrm = xi.l2_norm();
    fam->cg /= nrm;
    fam->ch /= nrm;
  }
  // truncate negligible modes
  const double tail = 1e-17 * std::max(fam->cg.cwiseAbs().maxCoeff(), fam->ch.cwiseAbs().maxCoeff());
  int K = static_cast<int>(fam->k_modes.size());
  while (K > 2 && std::abs(fam->cg[K - 1]) < tail && std::abs(fam->ch[K - 1]) < tail) --K;
  fam->k_modes.conservativeResize(K);
  fam->cg.conservativeResize(K);
  fam->ch.conservativeResize(K);

  cache.emplace(p, fam);
  return *cache[p];
}

}  // namespace

double mu1_of(double p) { return xi_family(p).mu1; }

void xi_and_dxi(double p, double omega, const Grid& grid, VecField& xi_out, VecField& dxi_out) {
  const XiFamily& fam = xi_family(p);
  const double rw = std::sqrt(omega);
  SeriesEval ev = eval_series(fam, rw, grid.xs());
  const int n = grid.n();
  ComplexArray a(n), da(n);
  for (int i = 0; i < n; ++i) {
    const Complex G(0.5 * ev.g[i], 0.5 * ev.h[i]);
    const Complex dG(0.5 * ev.dg[i], 0.5 * ev.dh[i]);
    a[i] = rw * G;
    da[i] = G / (2.0 * rw) + 0.5 * grid.xs()[i] * dG;
  }
  xi_out = VecField(grid, a, a.conjugate());
  dxi_out = VecField(grid, da, da.conjugate());
}

VecField xi_field(double p, double omega, const Grid& grid) {
  VecField xi(grid), dxi(grid);
  xi_and_dxi(p, omega, grid, xi, dxi);
  return xi;
}

VecField dxi_domega_field(double p, double omega, const Grid& grid) {
  VecField xi(grid), dxi(grid);
  xi_and_dxi(p, omega, grid, xi, dxi);
  return dxi;
}

VecField apply_H(double omega, double p, const VecField& f) {
  const RealArray pot = phi_pm1_profile(p, omega, f.grid);
  const double cp = 0.5 * (p + 1.0), cm = 0.5 * (p - 1.0);
  ComplexArray d2a = f.grid.derivative(f.a, 2);
  ComplexArray d2b = f.grid.derivative(f.b, 2);
  ComplexArray out_a = -d2a + omega * f.a - cp * pot * f.a - cm * pot * f.b;
  ComplexArray out_b = d2b - omega * f.b + cm * pot * f.a + cp * pot * f.b;
  return VecField(f.grid, std::move(out_a), std::move(out_b));
}

VecField apply_potential(double omega, double p, const VecField& f) {
  const RealArray pot = phi_pm1_profile(p, omega, f.grid);
  const double cp = 0.5 * (p + 1.0), cm = 0.5 * (p - 1.0);
  ComplexArray out_a = -cp * pot * f.a - cm * pot * f.b;
  ComplexArray out_b = cm * pot * f.a + cp * pot * f.b;
  return VecField(f.grid, std::move(out_a), std::move(out_b));
}

namespace {

struct DecayFit {
  double c = 0.0, a = 0.0, r2 = 0.0;
};

DecayFit fit_decay(const VecField& xi, double omega) {
  const Grid& g = xi.grid;
  const double rw = std::sqrt(omega);
  std::vector<double> xs, ys;
  const double amax = xi.a.abs().maxCoeff();
  for (int i = 0; i < g.n() / 2 + 1; ++i) {
    const double ax = std::abs(g.x(i));
    const double v = std::abs(xi.a[i]);
    if (ax * rw < 2.0 || v < 1e-13 * amax) continue;
    xs.push_back(ax);
    ys.push_back(std::log(v));
  }
  DecayFit fit;
  const int n = static_cast<int>(xs.size());
  if (n < 8) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / n;
  fit.a = -slope / rw;
  fit.c = std::exp(icept) / rw;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ys[i] - (icept + slope * xs[i]);
    ss_res += r * r;
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

SpectralData assemble(double p, double omega, const Grid& grid, double mu, const VecField& xi_in) {
  SpectralData sd(grid);
  sd.omega = omega;
  sd.p = p;
  sd.mu = mu;
  sd.xi = xi_in;

  SolitonParams params{omega, 0.0, p};
  VecField phi = phi_field(params, grid);
  sd.sigma3_phi = phi.sigma3();
  sd.dphi = dphi_domega_field(params, grid);

  sd.lambda1 = (pair(sd.xi, sd.xi.sigma3()) / Complex(0.0, 1.0)).real();
  if (sd.lambda1 == 0.0) throw DegenerateSpectrumError("pair(xi, sigma3 xi) vanished");
  sd.d1 = -1.0 / sd.lambda1;

  sd.pd_basis = {sd.sigma3_phi, sd.dphi, sd.xi, sd.xi.sigma1()};
  Eigen::Matrix4cd gram;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gram(i, j) = pair(sd.pd_basis[i], sd.pd_basis[j].sigma3());
  Eigen::FullPivLU<Eigen::Matrix4cd> lu(gram);
  if (!lu.isInvertible()) {
    throw DegenerateSpectrumError("sigma3-Gram matrix of the discrete basis is singular");
  }
  sd.gram_inv = lu.inverse();

  const DecayFit fit = fit_decay(sd.xi, omega);
  sd.decay_c = fit.c;
  sd.decay_a = fit.a;
  sd.decay_r2 = fit.r2;

  VecField res = apply_H(omega, p, sd.xi);
  res -= Complex(0.0, mu) * sd.xi;
  sd.xi_residual = res.l2_norm() / (mu * sd.xi.l2_norm());
  return sd;
}

struct CacheKey {
  double p, omega, L;
  int n;
  bool modes;
  bool operator<(const CacheKey& o) const {
    return std::tie(p, omega, L, n, modes) < std::tie(o.p, o.omega, o.L, o.n, o.modes);
  }
};

}  // namespace

SpectralData spectral_direct(double p, double omega, const Grid& grid, bool with_modes) {
  DenseSolve sol = dense_eigensolve(p, omega, grid);
  VecField xi(grid, extend_even(grid, sol.xi_g, sol.xi_h) * 0.5,
              extend_even(grid, sol.xi_g, (-sol.xi_h).eval()) * 0.5);
  xi *= Complex(1.0 / xi.l2_norm(), 0.0);
  SpectralData sd = assemble(p, omega, grid, sol.mu, xi);
  if (with_modes) sd.pc = std::make_shared<PcModes>(std::move(sol.modes));
  return sd;
}

std::shared_ptr<const SpectralData> spectral(double p, double omega, const Grid& grid) {
  static std::mutex mu;
  static std::map<CacheKey, std::shared_ptr<const SpectralData>> cache;
  const CacheKey key{p, omega, grid.half_length(), grid.n(), false};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  VecField xi = xi_field(p, omega, grid);
  auto sd = std::make_shared<SpectralData>(assemble(p, omega, grid, omega * mu1_of(p), xi));
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, sd);
  return cache[key];
}

std::shared_ptr<const SpectralData> spectral_with_modes(double p, double omega, const Grid& grid) {
  static std::mutex mu;
  static std::map<CacheKey, std::shared_ptr<const SpectralData>> cache;
  const CacheKey key{p, omega, grid.half_length(), grid.n(), true};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto sd = std::make_shared<SpectralData>(spectral_direct(p, omega, grid, true));
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, sd);
  return cache[key];
}

// ----------------------------------------------------------------------------
// Projections and the semigroup.

VecField SpectralData::project_d(const VecField& f) const {
  Eigen::Vector4cd c;
  for (int i = 0; i < 4; ++i) c[i] = pair(f, pd_basis[i].sigma3());
  const Eigen::Vector4cd coeff = gram_inv * c;
  VecField out = VecField::zero(grid);
  for (int i = 0; i < 4; ++i) out += coeff[i] * pd_basis[i];
  return out;
}

VecField SpectralData::project_c(const VecField& f) const {
  VecField out = f;
  out -= project_d(f);
  return out;
}

PcCoeffs SpectralData::analyze(const VecField& f) const {
  if (!pc) throw PreconditionError("continuous-spectrum modes were not computed");
  const int nh = pc->n_half;
  Eigen::VectorXcd fg(nh), fh(nh);
  for (int i = 0; i < nh; ++i) {
    fg[i] = (f.a[i] + f.b[i]) * pc->weights[i];
    fh[i] = (f.a[i] - f.b[i]) * pc->weights[i];
  }
  auto split_mul = [&](const Eigen::MatrixXd& m, const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    return (m.transpose() * v.real()).array() + Complex(0.0, 1.0) * (m.transpose() * v.imag()).array();
  };
  Eigen::VectorXcd q = split_mul(pc->h_modes, fg);
  Eigen::VectorXcd r = split_mul(pc->g_modes, fh);
  PcCoeffs c;
  c.plus = (q + r).array() / (2.0 * pc->s_norm.array());
  c.minus = (q - r).array() / (2.0 * pc->s_norm.array());
  return c;
}

VecField SpectralData::synthesize(const PcCoeffs& c) const {
  if (!pc) throw PreconditionError("continuous-spectrum modes were not computed");
  auto mul = [&](const Eigen::MatrixXd& m, const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    return (m * v.real()).array() + Complex(0.0, 1.0) * (m * v.imag()).array();
  };
  Eigen::VectorXcd g = mul(pc->g_modes, Eigen::VectorXcd(c.plus + c.minus));
  Eigen::VectorXcd h = mul(pc->h_modes, Eigen::VectorXcd(c.plus - c.minus));
  ComplexArray a(grid.n()), b(grid.n());
  for (int i = 0; i < grid.n(); ++i) {
    const int j = std::min(i, grid.n() - i);
    a[i] = 0.5 * (g[j] + h[j]);
    b[i] = 0.5 * (g[j] - h[j]);
  }
  return VecField(grid, std::move(a), std::move(b));
}

std::pair<VecField, VecField> SpectralData::project_pm(const VecField& f) const {
  PcCoeffs c = analyze(project_c(f));
  PcCoeffs cp{c.plus, Eigen::VectorXcd::Zero(c.minus.size())};
  PcCoeffs cm{Eigen::VectorXcd::Zero(c.plus.size()), c.minus};
  return {synthesize(cp), synthesize(cm)};
}

VecField SpectralData::semigroup(double t, const VecField& f) const {
  if (!std::isfinite(t)) throw PreconditionError("semigroup time must be finite");
  PcCoeffs c = analyze(project_c(f));
  const Complex I(0.0, 1.0);
  for (int j = 0; j < c.plus.size(); ++j) {
    c.plus[j] *= std::exp(-I * pc->lambda[j] * t);
    c.minus[j] *= std::exp(I * pc->lambda[j] * t);
  }
  return synthesize(c);
}

// ----------------------------------------------------------------------------
// Batched coefficient transforms.

Eigen::MatrixXcd real_times_complex(const Eigen::MatrixXd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows(), b.cols());
  out.real() = a * b.real();
  out.imag() = a * b.imag();
  return out;
}

PcBatch analyze_batch(const SpectralData& sd, const std::vector<VecField>& fields) {
  if (!sd.has_modes()) throw PreconditionError("continuous-spectrum modes were not computed");
  const PcModes& pc = *sd.pc;
  const int nh = pc.n_half;
  const int mt = static_cast<int>(fields.size());
  Eigen::MatrixXcd fg(nh, mt), fh(nh, mt);
  for (int j = 0; j < mt; ++j) {
    for (int i = 0; i < nh; ++i) {
      const Complex a = fields[j].a[i], b = fields[j].b[i];
      fg(i, j) = (a + b) * pc.weights[i];
      fh(i, j) = (a - b) * pc.weights[i];
    }
  }
  Eigen::MatrixXcd q = real_times_complex(pc.h_modes.transpose(), fg);
  Eigen::MatrixXcd r = real_times_complex(pc.g_modes.transpose(), fh);
  PcBatch out;
  const Eigen::ArrayXd inv2s = 0.5 / pc.s_norm.array();
  out.plus = ((q + r).array().colwise() * inv2s).matrix();
  out.minus = ((q - r).array().colwise() * inv2s).matrix();
  return out;
}

std::vector<VecField> synthesize_batch(const SpectralData& sd, const Eigen::MatrixXcd& plus,
                                       const Eigen::MatrixXcd& minus) {
  if (!sd.has_modes()) throw PreconditionError("continuous-spectrum modes were not computed");
  const PcModes& pc = *sd.pc;
  const Grid& grid = sd.grid;
  const int mt = static_cast<int>(plus.cols());
  Eigen::MatrixXcd g = real_times_complex(pc.g_modes, plus + minus);
  Eigen::MatrixXcd h = real_times_complex(pc.h_modes, plus - minus);
  std::vector<VecField> out;
  out.reserve(mt);
  for (int j = 0; j < mt; ++j) {
    VecField f(grid);
    for (int i = 0; i < grid.n(); ++i) {
      const int k = std::min(i, grid.n() - i);
      f.a[i] = 0.5 * (g(k, j) + h(k, j));
      f.b[i] = 0.5 * (g(k, j) - h(k, j));
    }
    out.push_back(std::move(f));
  }
  return out;
}

Eigen::MatrixXcd mode_phases(const SpectralData& sd, const std::vector<double>& ts) {
  if (!sd.has_modes()) throw PreconditionError("continuous-spectrum modes were not computed");
  const Eigen::VectorXd& lam = sd.pc->lambda;
  Eigen::MatrixXcd ph(lam.size(), ts.size());
  const Complex I(0.0, 1.0);
  for (int j = 0; j < static_cast<int>(ts.size()); ++j) {
    for (int k = 0; k < lam.size(); ++k) ph(k, j) = std::exp(-I * lam[k] * ts[j]);
  }
  return ph;
}

std::vector<VecField> semigroup_batch(const SpectralData& sd, const std::vector<double>& ts,
                                      const VecField& f) {
  PcCoeffs c = sd.analyze(sd.project_c(f));
  Eigen::MatrixXcd phase = mode_phases(sd, ts);
  const int mt = static_cast<int>(ts.size());
  Eigen::MatrixXcd cp(c.plus.size(), mt), cm(c.minus.size(), mt);
  for (int j = 0; j < mt; ++j) {
    cp.col(j) = c.plus.array() * phase.col(j).array();
    cm.col(j) = c.minus.array() * phase.col(j).conjugate().array();
  }
  return synthesize_batch(sd, cp, cm);
}

// ----------------------------------------------------------------------------
// Decay-matching shooting for mu: the grid-free second route.

namespace {

struct OdeParams {
  double p, omega, mu;
};

// y = (g, h, g', h'); L+ g = mu h and L- h = -mu g written first order.
inline void shoot_rhs(const OdeParams& q, double x, const double* y, double* dy) {
  const double sech = 1.0 / std::cosh(0.5 * (q.p - 1.0) * std::sqrt(q.omega) * x);
  const double pot = q.omega * (q.p + 1.0) / 2.0 * sech * sech;  // phi^{p-1}
  dy[0] = y[2];
  dy[1] = y[3];
  dy[2] = (q.omega - q.p * pot) * y[0] - q.mu * y[1];
  dy[3] = (q.omega - pot) * y[1] + q.mu * y[0];
}

void rk4_step(const OdeParams& q, double& x, double h, double* y) {
  double k1[4], k2[4], k3[4], k4[4], tmp[4];
  shoot_rhs(q, x, y, k1);
  for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  shoot_rhs(q, x + 0.5 * h, tmp, k2);
  for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  shoot_rhs(q, x + 0.5 * h, tmp, k3);
  for (int i = 0; i < 4; ++i) tmp[i] = y[i] + h * k3[i];
  shoot_rhs(q, x + h, tmp, k4);
  for (int i = 0; i < 4; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  x += h;
}

void integrate(const OdeParams& q, double x0, double x1, double* y) {
  const int steps = std::max(64, static_cast<int>(std::ceil(std::abs(x1 - x0) / 2e-3)));
  const double h = (x1 - x0) / steps;
  double x = x0;
  for (int s = 0; s < steps; ++s) {
    rk4_step(q, x, h, y);
    // renormalize to keep the growing solutions in range
    double scale = 0.0;
    for (int i = 0; i < 4; ++i) scale = std::max(scale, std::abs(y[i]));
    if (scale > 1e100) {
      for (int i = 0; i < 4; ++i) y[i] /= scale;
    }
  }
}

// Evans-style matching determinant at x_match.
double matching_det(double p, double omega, double mu, double x_far, double x_match) {
  const OdeParams q{p, omega, mu};
  Eigen::Matrix4d m;
  // even solutions grown outward from x = 0
  double u1[4] = {1, 0, 0, 0}, u2[4] = {0, 1, 0, 0};
  integrate(q, 0.0, x_match, u1);
  integrate(q, 0.0, x_match, u2);
  // decaying solutions grown inward from x_far: far-field decay exponents
  // kappa = sqrt(omega + i mu) with eigenvector (1, -i)
  const Complex kappa = std::sqrt(Complex(omega, mu));
  double v1[4] = {1, 0, -kappa.real(), -kappa.imag()};
  double v2[4] = {0, -1, -kappa.imag(), kappa.real()};
  integrate(q, x_far, x_match, v1);
  integrate(q, x_far, x_match, v2);
  auto set_col = [&](int c, const double* y) {
    Eigen::Vector4d v(y[0], y[1], y[2], y[3]);
    m.col(c) = v / v.norm();
  };
  set_col(0, u1);
  set_col(1, u2);
  set_col(2, v1);
  set_col(3, v2);
  return m.determinant();
}

}  // namespace

double mu_by_shooting(double p, double omega) {
  const double x_far = 6.0 + 16.0 / std::min(1.0, std::sqrt(omega));
  const double x_match = 2.5 / std::sqrt(std::max(omega, 0.25));
  const double mu_lo = 0.02 * omega, mu_hi = 12.0 * omega;
  const int n_scan = 360;

  std::vector<double> roots;
  double prev_mu = mu_lo;
  double prev_det = matching_det(p, omega, prev_mu, x_far, x_match);
  for (int i = 1; i <= n_scan; ++i) {
    const double mu = mu_lo + (mu_hi - mu_lo) * i / n_scan;
    const double det = matching_det(p, omega, mu, x_far, x_match);
    if (std::signbit(det) != std::signbit(prev_det)) {
      double a = prev_mu, b = mu, fa = prev_det;
      for (int it = 0; it < 80; ++it) {
        const double c = 0.5 * (a + b);
        const double fc = matching_det(p, omega, c, x_far, x_match);
        if (std::signbit(fc) == std::signbit(fa)) {
          a = c;
          fa = fc;
        } else {
          b = c;
        }
        if (b - a < 1e-12 * omega) break;
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_mu = mu;
    prev_det = det;
  }
  if (roots.empty()) {
    throw SpectralFailure("shooting found no imaginary eigenvalue in the scan window");
  }
  if (roots.size() > 1) {
    std::ostringstream msg;
    msg << "shooting found " << roots.size() << " candidate eigenvalues";
    throw SpectralFailure(msg.str());
  }
  return roots.front();
}

}  // namespace nlslab
