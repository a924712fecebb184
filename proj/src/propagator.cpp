#include "qsol/propagator.hpp"

#include <cmath>
#include <string>

namespace qsol {

namespace {

inline Complex mul_i(Complex z) { return Complex(-z.imag(), z.real()); }

// Fused evaluation of the closed moment equations:
//   d mean_k = i(w2/2)(Lap mean)_k - g mean_k
//              - i chi [ (|m_k|^2 + 2 N_kk) m_k + A_kk conj(m_k) ]
//   d N_kl   = i(w2/2)(N Lap - Lap N)_kl - 2g N_kl
//              + i chi [ conj(U_k) A_kl - U_l conj(A_kl) + 2(W_k - W_l) N_kl ]
//   d A_kl   = i(w2/2)(Lap A + A Lap)_kl - 2g A_kl
//              - i chi [ U_k N_kl + U_l (N_lk + d_kl) + 2(W_k + W_l) A_kl ]
// with U_k = m_k^2 + A_kk, W_k = |m_k|^2 + N_kk. The N Lap - Lap N stencil
// has no diagonal contribution, so it reduces to four neighbour reads.
void rhs_core(const GaussianState& s, const PhysicsParams& p, MomentDerivative& out) {
  const int m = s.grid.sites;
  const double inv_dx2 = 1.0 / (s.grid.spacing * s.grid.spacing);
  const double disp = 0.5 * p.omega2 * inv_dx2;  // imaginary prefactor of the stencils
  const double chi = p.chi;
  const double g1 = p.gamma;
  const double g2 = 2.0 * p.gamma;

  const VecC& mean = s.mean;
  std::vector<Complex> u(m);
  std::vector<double> w(m);
  for (int k = 0; k < m; ++k) {
    const Complex mk = mean[k];
    u[k] = mk * mk + s.anomalous(k, k);
    w[k] = std::norm(mk) + s.normal(k, k).real();
  }

  for (int k = 0; k < m; ++k) {
    const int kp = (k + 1 == m) ? 0 : k + 1;
    const int km = (k == 0) ? m - 1 : k - 1;
    const Complex stencil = disp * (mean[kp] - 2.0 * mean[k] + mean[km]);
    Complex kerr(0.0, 0.0);
    if (chi != 0.0) {
      const double nkk = s.normal(k, k).real();
      kerr = -chi * ((w[k] + nkk) * mean[k] + s.anomalous(k, k) * std::conj(mean[k]));
    }
    out.dmean[k] = mul_i(stencil + kerr) - g1 * mean[k];
  }

  const Complex* nd = s.normal.data();
  const Complex* ad = s.anomalous.data();
  Complex* dn = out.dnormal.data();
  Complex* da = out.danomalous.data();

#pragma omp parallel for schedule(static) if (m >= 64)
  for (int l = 0; l < m; ++l) {
    const int lp = (l + 1 == m) ? 0 : l + 1;
    const int lm = (l == 0) ? m - 1 : l - 1;
    const Complex* ncol = nd + static_cast<std::ptrdiff_t>(l) * m;
    const Complex* ncp = nd + static_cast<std::ptrdiff_t>(lp) * m;
    const Complex* ncm = nd + static_cast<std::ptrdiff_t>(lm) * m;
    const Complex* acol = ad + static_cast<std::ptrdiff_t>(l) * m;
    const Complex* acp = ad + static_cast<std::ptrdiff_t>(lp) * m;
    const Complex* acm = ad + static_cast<std::ptrdiff_t>(lm) * m;
    Complex* dncol = dn + static_cast<std::ptrdiff_t>(l) * m;
    Complex* dacol = da + static_cast<std::ptrdiff_t>(l) * m;
    const Complex ul = u[l];
    const double wl = w[l];
    for (int k = 0; k < m; ++k) {
      const int kp = (k + 1 == m) ? 0 : k + 1;
      const int km = (k == 0) ? m - 1 : k - 1;
      const Complex nkl = ncol[k];
      const Complex akl = acol[k];

      Complex sn = disp * (ncp[k] + ncm[k] - ncol[kp] - ncol[km]);
      Complex sa = disp * (acp[k] + acm[k] + acol[kp] + acol[km] - 4.0 * akl);
      if (chi != 0.0) {
        const Complex kerr_n =
            std::conj(u[k]) * akl - ul * std::conj(akl) + (2.0 * (w[k] - wl)) * nkl;
        Complex kerr_a = u[k] * nkl + ul * std::conj(nkl) + (2.0 * (w[k] + wl)) * akl;
        if (k == l) kerr_a += ul;  // vacuum seeding of the anomalous diagonal
        sn += chi * kerr_n;
        sa -= chi * kerr_a;
      }
      dncol[k] = mul_i(sn) - g2 * nkl;
      dacol[k] = mul_i(sa) - g2 * akl;
    }
  }
}

void resymmetrize(GaussianState& s) {
  const int m = s.grid.sites;
  for (int l = 0; l < m; ++l) {
    s.normal(l, l) = Complex(s.normal(l, l).real(), 0.0);
    for (int k = 0; k < l; ++k) {
      const Complex nh = 0.5 * (s.normal(k, l) + std::conj(s.normal(l, k)));
      s.normal(k, l) = nh;
      s.normal(l, k) = std::conj(nh);
      const Complex as = 0.5 * (s.anomalous(k, l) + s.anomalous(l, k));
      s.anomalous(k, l) = as;
      s.anomalous(l, k) = as;
    }
  }
}

void cheap_sanity(const GaussianState& s) {
  if (!s.mean.allFinite())
    throw NumericalAbort("propagation produced a non-finite mean field", s.t);
  double trace = 0.0;
  double min_diag = 0.0;
  for (int k = 0; k < s.grid.sites; ++k) {
    const double d = s.normal(k, k).real();
    if (!std::isfinite(d))
      throw NumericalAbort("propagation produced non-finite fluctuations", s.t);
    trace += d;
    min_diag = std::min(min_diag, d);
  }
  if (min_diag < -1e-6 * std::max(1.0, trace))
    throw NumericalAbort("fluctuation occupation went negative (dt too large?)", s.t);
}

}  // namespace

MomentIntegrator::MomentIntegrator(const Grid& g) {
  const int m = g.sites;
  k_.dmean.resize(m);
  k_.dnormal.resize(m, m);
  k_.danomalous.resize(m, m);
  stage_ = GaussianState::vacuum(g);
  acc_ = GaussianState::vacuum(g);
}

void MomentIntegrator::rhs(const GaussianState& s, const PhysicsParams& p,
                           MomentDerivative& out) const {
  rhs_core(s, p, out);
}

void MomentIntegrator::step(GaussianState& s, const PhysicsParams& p, double dt) {
  const double t0 = s.t;
  const double h2 = 0.5 * dt, h3 = dt / 3.0, h6 = dt / 6.0;

  rhs_core(s, p, k_);
  acc_.mean = s.mean + h6 * k_.dmean;
  acc_.normal = s.normal + h6 * k_.dnormal;
  acc_.anomalous = s.anomalous + h6 * k_.danomalous;
  stage_.grid = s.grid;
  stage_.mean = s.mean + h2 * k_.dmean;
  stage_.normal = s.normal + h2 * k_.dnormal;
  stage_.anomalous = s.anomalous + h2 * k_.danomalous;

  rhs_core(stage_, p, k_);
  acc_.mean += h3 * k_.dmean;
  acc_.normal += h3 * k_.dnormal;
  acc_.anomalous += h3 * k_.danomalous;
  stage_.mean = s.mean + h2 * k_.dmean;
  stage_.normal = s.normal + h2 * k_.dnormal;
  stage_.anomalous = s.anomalous + h2 * k_.danomalous;

  rhs_core(stage_, p, k_);
  acc_.mean += h3 * k_.dmean;
  acc_.normal += h3 * k_.dnormal;
  acc_.anomalous += h3 * k_.danomalous;
  stage_.mean = s.mean + dt * k_.dmean;
  stage_.normal = s.normal + dt * k_.dnormal;
  stage_.anomalous = s.anomalous + dt * k_.danomalous;

  rhs_core(stage_, p, k_);
  s.mean = acc_.mean + h6 * k_.dmean;
  s.normal = acc_.normal + h6 * k_.dnormal;
  s.anomalous = acc_.anomalous + h6 * k_.danomalous;

  s.t = t0 + dt;
  resymmetrize(s);
  cheap_sanity(s);
}

MomentDerivative moment_rhs(const GaussianState& s, const PhysicsParams& p) {
  if (s.grid.domain != Domain::Position)
    throw ContractViolation("moment_rhs expects a position-domain state");
  MomentDerivative d;
  const int m = s.grid.sites;
  d.dmean.resize(m);
  d.dnormal.resize(m, m);
  d.danomalous.resize(m, m);
  rhs_core(s, p, d);
  return d;
}

GaussianState rk4_step(const GaussianState& s, const PhysicsParams& p, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("rk4_step: dt must be positive");
  MomentIntegrator integ(s.grid);
  GaussianState out = s;
  integ.step(out, p, dt);
  return out;
}

double default_dt(const GaussianState& s, const PhysicsParams& p) {
  double dt = std::numeric_limits<double>::infinity();
  if (p.omega2 != 0.0)
    dt = std::min(dt, 0.25 * s.grid.spacing * s.grid.spacing / std::abs(p.omega2));
  if (p.chi != 0.0) {
    double wmax = 0.0;
    for (int k = 0; k < s.grid.sites; ++k)
      wmax = std::max(wmax, std::norm(s.mean[k]) + s.normal(k, k).real());
    if (wmax > 0.0) dt = std::min(dt, 0.05 / (std::abs(p.chi) * wmax));
  }
  if (p.gamma > 0.0) dt = std::min(dt, 0.05 / p.gamma);
  if (!std::isfinite(dt)) throw ConfigError("default_dt: no active term bounds the step");
  return dt;
}

void evolve(const GaussianState& s0, const PhysicsParams& p, double t_end, double dt,
            const std::vector<double>& snapshot_times, const SnapshotFn& on_snapshot) {
  if (s0.grid.domain != Domain::Position)
    throw ContractViolation("evolve expects a position-domain state");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("evolve: dt must be positive");
  if (t_end < s0.t) throw ContractViolation("evolve: t_end precedes the state time");

  std::vector<double> targets = snapshot_times;
  if (targets.empty()) targets.push_back(t_end);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (i > 0 && targets[i] < targets[i - 1])
      throw ContractViolation("evolve: snapshot times must be sorted");
    if (targets[i] < s0.t - 1e-12 || targets[i] > t_end + 1e-12)
      throw ContractViolation("evolve: snapshot time outside [t0, t_end]");
  }

  GaussianState state = s0;
  MomentIntegrator integ(state.grid);
  const double tiny = 1e-12 * std::max(1.0, std::abs(t_end));

  for (double target : targets) {
    while (target - state.t > tiny) {
      const double h = std::min(dt, target - state.t);
      integ.step(state, p, h);
    }
    state.t = target;
    const double trace = state.normal.diagonal().real().sum();
    const double tol = (trace < 1.0) ? 1e-10 : 1e-6;
    PhysicalityReport rep = physicality_check(state, tol);
    if (!rep.pass)
      throw NumericalAbort("state failed the physicality check (min eigenvalue " +
                               std::to_string(rep.min_eigenvalue) + ")",
                           state.t);
    on_snapshot(state, rep);
  }
}

std::vector<GaussianState> evolve(const GaussianState& s0, const PhysicsParams& p, double t_end,
                                  double dt, const std::vector<double>& snapshot_times) {
  std::vector<GaussianState> out;
  evolve(s0, p, t_end, dt, snapshot_times,
         [&out](const GaussianState& s, const PhysicalityReport&) { out.push_back(s); });
  return out;
}

VecC classical_rhs(const Grid& g, const VecC& mean, const PhysicsParams& p) {
  const int m = g.sites;
  const double inv_dx2 = 1.0 / (g.spacing * g.spacing);
  const double disp = 0.5 * p.omega2 * inv_dx2;
  VecC out(m);
  for (int k = 0; k < m; ++k) {
    const int kp = (k + 1 == m) ? 0 : k + 1;
    const int km = (k == 0) ? m - 1 : k - 1;
    const Complex stencil = disp * (mean[kp] - 2.0 * mean[k] + mean[km]);
    out[k] = mul_i(stencil - p.chi * std::norm(mean[k]) * mean[k]) - p.gamma * mean[k];
  }
  return out;
}

VecC evolve_classical(const Grid& g, VecC mean, const PhysicsParams& p, double t_end, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("evolve_classical: dt must be positive");
  double t = 0.0;
  VecC k1, k2, k3, k4;
  while (t < t_end - 1e-12 * std::max(1.0, t_end)) {
    const double h = std::min(dt, t_end - t);
    k1 = classical_rhs(g, mean, p);
    k2 = classical_rhs(g, mean + 0.5 * h * k1, p);
    k3 = classical_rhs(g, mean + 0.5 * h * k2, p);
    k4 = classical_rhs(g, mean + h * k3, p);
    mean += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return mean;
}

}  // namespace qsol
