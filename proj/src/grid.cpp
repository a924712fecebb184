#include "qsol/grid.hpp"

#include <cmath>

namespace qsol {

Grid build_grid(int sites, double length) {
  if (sites < 2) throw ConfigError("grid needs at least 2 sites");
  if (!(length > 0.0)) throw ConfigError("grid length must be positive");
  Grid g;
  g.sites = sites;
  g.length = length;
  g.spacing = length / sites;
  g.domain = Domain::Position;
  g.coords.resize(sites);
  for (int k = 0; k < sites; ++k) g.coords[k] = -0.5 * length + (k + 0.5) * g.spacing;
  return g;
}

Grid frequency_grid(const Grid& position_grid) {
  if (position_grid.domain != Domain::Position)
    throw ContractViolation("frequency_grid expects a position-domain grid");
  const int m = position_grid.sites;
  Grid g;
  g.sites = m;
  g.length = position_grid.length;
  g.spacing = 2.0 * M_PI / position_grid.length;
  g.domain = Domain::Frequency;
  g.coords.resize(m);
  // Centered DFT frequencies: -pi/dx, ..., +pi/dx - 2*pi/L.
  for (int j = 0; j < m; ++j) g.coords[j] = (j - m / 2) * g.spacing;
  return g;
}

VecC laplacian_apply(const Grid& g, const VecC& v) {
  if (g.domain != Domain::Position)
    throw ContractViolation("laplacian_apply expects a position-domain grid");
  if (v.size() != g.sites) throw ContractViolation("laplacian_apply: vector length mismatch");
  const int m = g.sites;
  const double inv_dx2 = 1.0 / (g.spacing * g.spacing);
  VecC out(m);
  for (int k = 0; k < m; ++k) {
    const int kp = (k + 1 == m) ? 0 : k + 1;
    const int km = (k == 0) ? m - 1 : k - 1;
    out[k] = (v[kp] - 2.0 * v[k] + v[km]) * inv_dx2;
  }
  return out;
}

MatR laplacian_matrix(const Grid& g) {
  if (g.domain != Domain::Position)
    throw ContractViolation("laplacian_matrix expects a position-domain grid");
  const int m = g.sites;
  const double inv_dx2 = 1.0 / (g.spacing * g.spacing);
  MatR lap = MatR::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    const int kp = (k + 1 == m) ? 0 : k + 1;
    const int km = (k == 0) ? m - 1 : k - 1;
    lap(k, k) += -2.0 * inv_dx2;
    lap(k, kp) += inv_dx2;  // for M=2 both neighbours are the same site
    lap(k, km) += inv_dx2;
  }
  return lap;
}

MatC dft_matrix(const Grid& position_grid) {
  if (position_grid.domain != Domain::Position)
    throw ContractViolation("dft_matrix expects a position-domain grid");
  const Grid freq = frequency_grid(position_grid);
  const int m = position_grid.sites;
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  MatC u(m, m);
  for (int j = 0; j < m; ++j) {
    const double w = freq.coords[j];
    for (int k = 0; k < m; ++k) {
      const double phase = w * position_grid.coords[k];
      u(j, k) = Complex(std::cos(phase), std::sin(phase)) * norm;
    }
  }
  return u;
}

}  // namespace qsol
