#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qsol/errors.hpp"

namespace qsol {

using Complex = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;

enum class Domain { Position, Frequency };

// Uniform periodic 1D lattice. Position grids place sites at
// -L/2 + (k + 1/2) dx; the frequency counterpart carries the centered DFT
// frequency set, spacing 2*pi/L, running from -pi/dx to +pi/dx - 2*pi/L.
struct Grid {
  int sites = 0;         // M
  double length = 0.0;   // L
  double spacing = 0.0;  // dx, or 2*pi/L in the frequency domain
  Domain domain = Domain::Position;
  VecR coords;

  bool same_lattice(const Grid& other) const {
    return sites == other.sites && length == other.length && domain == other.domain;
  }
};

Grid build_grid(int sites, double length);

// Frequency-domain counterpart of a position grid (same M, same L).
Grid frequency_grid(const Grid& position_grid);

// (v[k+1] - 2 v[k] + v[k-1]) / dx^2 with periodic wraparound.
VecC laplacian_apply(const Grid& g, const VecC& v);

// Dense form of the same operator (used by the Fock oracle and tests).
MatR laplacian_matrix(const Grid& g);

// Unitary position -> frequency mode map, u(j,k) = M^{-1/2} exp(+i w_j x_k).
MatC dft_matrix(const Grid& position_grid);

}  // namespace qsol
