#include "qsol/fock_oracle.hpp"

#include <cmath>

namespace qsol {

namespace {

MatC single_site_lowering(int cutoff) {
  const int d = cutoff + 1;
  MatC a = MatC::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

MatC kron(const MatC& a, const MatC& b) {
  MatC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MatR tiny_laplacian(int sites, double dx) {
  const double inv_dx2 = 1.0 / (dx * dx);
  MatR lap = MatR::Zero(sites, sites);
  if (sites == 1) return lap;  // periodic wraparound of a single site cancels
  for (int k = 0; k < sites; ++k) {
    const int kp = (k + 1 == sites) ? 0 : k + 1;
    const int km = (k == 0) ? sites - 1 : k - 1;
    lap(k, k) += -2.0 * inv_dx2;
    lap(k, kp) += inv_dx2;
    lap(k, km) += inv_dx2;
  }
  return lap;
}

}  // namespace

FockOperators build_operators(int sites, int cutoff, double dx, const PhysicsParams& p) {
  if (sites < 1 || sites > 3) throw ConfigError("Fock oracle supports 1 to 3 sites");
  if (cutoff < 1) throw ConfigError("Fock cutoff must be >= 1");
  double dim_d = std::pow(cutoff + 1.0, sites);
  if (dim_d > 13.0 * 13.0 * 13.0) throw ConfigError("Fock space dimension exceeds 13^3");
  if (!(dx > 0.0)) throw ConfigError("dx must be positive");
  p.validate();

  FockOperators ops;
  ops.sites = sites;
  ops.cutoff = cutoff;
  ops.dim = static_cast<int>(dim_d + 0.5);
  ops.dx = dx;
  ops.params = p;

  const MatC a1 = single_site_lowering(cutoff);
  const MatC id1 = MatC::Identity(cutoff + 1, cutoff + 1);
  for (int s = 0; s < sites; ++s) {
    MatC op = (s == 0) ? a1 : id1;
    for (int j = 1; j < sites; ++j) op = kron(op, (j == s) ? a1 : id1);
    ops.lower.push_back(op);
  }

  const MatR lap = tiny_laplacian(sites, dx);
  MatC h = MatC::Zero(ops.dim, ops.dim);
  for (int k = 0; k < sites; ++k) {
    for (int l = 0; l < sites; ++l)
      if (lap(k, l) != 0.0)
        h -= (0.5 * p.omega2 * lap(k, l)) * (ops.lower[k].adjoint() * ops.lower[l]);
    const MatC& ak = ops.lower[k];
    h += (0.5 * p.chi) * (ak.adjoint() * ak.adjoint() * ak * ak);
  }
  ops.hamiltonian = h;
  return ops;
}

FockOracleState coherent_oracle_state(int sites, int cutoff, const VecC& amplitudes) {
  if (amplitudes.size() != sites) throw ConfigError("one amplitude per site required");
  for (int s = 0; s < sites; ++s)
    if (std::norm(amplitudes[s]) > 1.0 + 1e-12)
      throw ConfigError("oracle amplitudes are limited to |alpha|^2 <= 1");

  const int d = cutoff + 1;
  VecC psi = VecC::Ones(1);
  for (int s = 0; s < sites; ++s) {
    VecC v(d);
    const Complex a = amplitudes[s];
    double log_fact = 0.0;
    for (int n = 0; n < d; ++n) {
      if (n > 0) log_fact += std::log(static_cast<double>(n));
      v[n] = std::pow(a, n) * std::exp(-0.5 * std::norm(a) - 0.5 * log_fact);
    }
    VecC next(psi.size() * d);
    for (int i = 0; i < psi.size(); ++i)
      for (int n = 0; n < d; ++n) next[i * d + n] = psi[i] * v[n];
    psi = next;
  }
  FockOracleState st;
  st.sites = sites;
  st.cutoff = cutoff;
  st.rho = psi * psi.adjoint();
  st.rho /= st.rho.trace().real();
  st.t = 0.0;
  return st;
}

FockOracleState thermal_oracle_state(int cutoff, double nbar) {
  if (nbar < 0.0) throw ConfigError("thermal occupation must be >= 0");
  const int d = cutoff + 1;
  FockOracleState st;
  st.sites = 1;
  st.cutoff = cutoff;
  st.rho = MatC::Zero(d, d);
  double norm = 0.0;
  for (int n = 0; n < d; ++n) {
    const double p = std::pow(nbar / (nbar + 1.0), n) / (nbar + 1.0);
    st.rho(n, n) = p;
    norm += p;
  }
  st.rho /= norm;
  st.t = 0.0;
  return st;
}

namespace {

MatC liouvillian(const MatC& rho, const FockOperators& ops) {
  MatC out = Complex(0.0, -1.0) * (ops.hamiltonian * rho - rho * ops.hamiltonian);
  if (ops.params.gamma > 0.0) {
    for (const MatC& a : ops.lower) {
      const MatC ad_a = a.adjoint() * a;
      out += ops.params.gamma * (2.0 * a * rho * a.adjoint() - rho * ad_a - ad_a * rho);
    }
  }
  return out;
}

}  // namespace

void evolve_density(FockOracleState& st, const FockOperators& ops, double t_end, double dt) {
  if (st.rho.rows() != ops.dim) throw ContractViolation("state/operator dimension mismatch");
  if (!(dt > 0.0)) throw ContractViolation("evolve_density: dt must be positive");
  while (st.t < t_end - 1e-12 * std::max(1.0, t_end)) {
    const double h = std::min(dt, t_end - st.t);
    const MatC k1 = liouvillian(st.rho, ops);
    const MatC k2 = liouvillian(st.rho + 0.5 * h * k1, ops);
    const MatC k3 = liouvillian(st.rho + 0.5 * h * k2, ops);
    const MatC k4 = liouvillian(st.rho + h * k3, ops);
    st.rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    st.rho = 0.5 * (st.rho + st.rho.adjoint()).eval();
    st.t += h;
    const double trace = st.rho.trace().real();
    if (std::abs(trace - 1.0) > 1e-6)
      throw NumericalAbort("oracle density matrix lost trace normalization", st.t);
  }
}

ExtractedMoments extract_moments(const FockOracleState& st, const FockOperators& ops) {
  const int s = ops.sites;
  ExtractedMoments out;
  out.mean.resize(s);
  out.normal.resize(s, s);
  out.anomalous.resize(s, s);
  for (int k = 0; k < s; ++k) out.mean[k] = (st.rho * ops.lower[k]).trace();
  for (int k = 0; k < s; ++k) {
    for (int l = 0; l < s; ++l) {
      out.normal(k, l) = (st.rho * ops.lower[k].adjoint() * ops.lower[l]).trace() -
                         std::conj(out.mean[k]) * out.mean[l];
      out.anomalous(k, l) =
          (st.rho * ops.lower[k] * ops.lower[l]).trace() - out.mean[k] * out.mean[l];
    }
  }
  return out;
}

double interval_mean_direct(const FockOracleState& st, const FockOperators& ops,
                            std::pair<int, int> range) {
  double sum = 0.0;
  for (int k = range.first; k < range.second; ++k)
    sum += (st.rho * ops.lower[k].adjoint() * ops.lower[k]).trace().real();
  return sum;
}

double interval_ncov_direct(const FockOracleState& st, const FockOperators& ops,
                            std::pair<int, int> range_i, std::pair<int, int> range_j) {
  // <: n_i n_j :> - m_i m_j with :n_i n_j: = sum a_k^+ a_l^+ a_k a_l.
  double nn = 0.0;
  for (int k = range_i.first; k < range_i.second; ++k)
    for (int l = range_j.first; l < range_j.second; ++l)
      nn += (st.rho * ops.lower[k].adjoint() * ops.lower[l].adjoint() * ops.lower[k] *
             ops.lower[l])
                .trace()
                .real();
  return nn - interval_mean_direct(st, ops, range_i) * interval_mean_direct(st, ops, range_j);
}

}  // namespace qsol
