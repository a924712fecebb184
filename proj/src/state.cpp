#include "qsol/state.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qsol {

void PhysicsParams::validate() const {
  if (gamma < 0.0) throw ConfigError("damping constant must be >= 0");
  if (!std::isfinite(omega2) || !std::isfinite(chi) || !std::isfinite(gamma))
    throw ConfigError("physics parameters must be finite");
}

SolitonSpec SolitonSpec::from_photon_number(int order, double n1, double width) {
  SolitonSpec s;
  s.order = order;
  s.n1 = n1;
  s.width = width;
  s.amplitude = std::sqrt(n1 / (2.0 * width));
  s.validate();
  return s;
}

void SolitonSpec::validate() const {
  if (order < 1) throw ConfigError("soliton order must be >= 1");
  if (!(n1 > 0.0)) throw ConfigError("fundamental photon number n1 must be positive");
  if (!(width > 0.0)) throw ConfigError("soliton width must be positive");
}

PhysicsParams soliton_params(const SolitonSpec& spec, const Grid& g, double omega2_sign,
                             double gamma, bool linear) {
  spec.validate();
  if (omega2_sign == 0.0) throw ConfigError("omega2 sign must be nonzero");
  PhysicsParams p;
  p.omega2 = (omega2_sign > 0.0) ? 1.0 : -1.0;
  // Soliton existence: chi_density * omega2 < 0 with a0^2 |chi_density| = |omega2| / x0^2.
  const double chi_density = -p.omega2 / (spec.amplitude * spec.amplitude * spec.width * spec.width);
  p.chi = linear ? 0.0 : chi_density / g.spacing;
  p.gamma = gamma;
  p.validate();
  return p;
}

GaussianState GaussianState::vacuum(const Grid& g) {
  GaussianState s;
  s.grid = g;
  s.mean = VecC::Zero(g.sites);
  s.normal = MatC::Zero(g.sites, g.sites);
  s.anomalous = MatC::Zero(g.sites, g.sites);
  s.t = 0.0;
  return s;
}

GaussianState nsoliton_state(const Grid& g, const SolitonSpec& spec) {
  if (g.domain != Domain::Position)
    throw ContractViolation("nsoliton_state expects a position-domain grid");
  spec.validate();
  GaussianState s = GaussianState::vacuum(g);
  const double scale = std::sqrt(g.spacing) * spec.order * spec.amplitude;
  for (int k = 0; k < g.sites; ++k)
    s.mean[k] = scale / std::cosh(g.coords[k] / spec.width);
  return s;
}

PhysicalityReport physicality_check(const GaussianState& s, double tol) {
  const int m = s.grid.sites;
  if (s.normal.rows() != m || s.normal.cols() != m || s.anomalous.rows() != m ||
      s.anomalous.cols() != m || s.mean.size() != m)
    throw ContractViolation("physicality_check: moment shapes do not match the grid");

  PhysicalityReport rep;
  rep.hermiticity_error = (s.normal - s.normal.adjoint()).cwiseAbs().maxCoeff();
  rep.symmetry_error = (s.anomalous - s.anomalous.transpose()).cwiseAbs().maxCoeff();

  MatC block(2 * m, 2 * m);
  block.topLeftCorner(m, m) = s.normal;
  block.topRightCorner(m, m) = s.anomalous.conjugate();
  block.bottomLeftCorner(m, m) = s.anomalous;
  block.bottomRightCorner(m, m) = s.normal.transpose() + MatC::Identity(m, m);
  // Symmetrize away the representation error before the eigensolve.
  MatC herm = 0.5 * (block + block.adjoint());
  Eigen::SelfAdjointEigenSolver<MatC> es(herm, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = es.eigenvalues().minCoeff();

  const double trace_scale = std::max(1.0, s.normal.real().trace());
  const double moment_scale = std::max(1.0, s.normal.cwiseAbs().maxCoeff());
  rep.pass = rep.min_eigenvalue >= -tol * trace_scale &&
             rep.hermiticity_error <= tol * moment_scale &&
             rep.symmetry_error <= tol * std::max(1.0, s.anomalous.cwiseAbs().maxCoeff());
  return rep;
}

double total_photon_number(const GaussianState& s) {
  return s.mean.squaredNorm() + s.normal.diagonal().real().sum();
}

FilterSpec FilterSpec::square(const Grid& g, double center, double half_width) {
  if (half_width < 0.0) throw ConfigError("filter half-width must be >= 0");
  FilterSpec f;
  f.domain = g.domain;
  f.transmittance = VecC::Zero(g.sites);
  for (int k = 0; k < g.sites; ++k)
    if (std::abs(g.coords[k] - center) <= half_width) f.transmittance[k] = 1.0;
  return f;
}

FilterSpec FilterSpec::uniform(const Grid& g, Complex value) {
  FilterSpec f;
  f.domain = g.domain;
  f.transmittance = VecC::Constant(g.sites, value);
  f.validate();
  return f;
}

void FilterSpec::validate() const {
  for (int k = 0; k < transmittance.size(); ++k)
    if (std::abs(transmittance[k]) > 1.0 + 1e-12)
      throw ConfigError("filter transmittance must satisfy |G| <= 1");
}

GaussianState apply_filter(const GaussianState& s, const FilterSpec& f) {
  if (f.domain != s.grid.domain)
    throw ContractViolation("apply_filter: filter domain does not match the state");
  if (f.transmittance.size() != s.grid.sites)
    throw ContractViolation("apply_filter: transmittance length mismatch");
  f.validate();

  GaussianState out = s;
  const VecC& g = f.transmittance;
  out.mean.array() *= g.array();
  out.normal = g.conjugate().asDiagonal() * s.normal * g.asDiagonal();
  out.anomalous = g.asDiagonal() * s.anomalous * g.asDiagonal();
  return out;
}

GaussianState to_frequency_domain(const GaussianState& s) {
  if (s.grid.domain != Domain::Position)
    throw ContractViolation("to_frequency_domain expects a position-domain state");
  const MatC u = dft_matrix(s.grid);
  GaussianState out;
  out.grid = frequency_grid(s.grid);
  out.t = s.t;
  out.mean = u * s.mean;
  out.normal = u.conjugate() * s.normal * u.transpose();
  out.anomalous = u * s.anomalous * u.transpose();
  return out;
}

GaussianState to_position_domain(const GaussianState& s) {
  if (s.grid.domain != Domain::Frequency)
    throw ContractViolation("to_position_domain expects a frequency-domain state");
  Grid pos = build_grid(s.grid.sites, s.grid.length);
  const MatC u = dft_matrix(pos);
  GaussianState out;
  out.grid = pos;
  out.t = s.t;
  out.mean = u.adjoint() * s.mean;
  out.normal = u.transpose() * s.normal * u.conjugate();
  out.anomalous = u.adjoint() * s.anomalous * u.conjugate();
  return out;
}

}  // namespace qsol
