#pragma once

#include "qsol/grid.hpp"

namespace qsol {

// Dispersion, Kerr, and damping constants in soliton units (x0 = 1,
// |omega2| = 1, t_d = 1). chi is the lattice-mode Kerr constant, i.e. the
// density-normalized chi divided by dx.
struct PhysicsParams {
  double omega2 = 1.0;
  double chi = 0.0;
  double gamma = 0.0;

  void validate() const;
};

// Classical N-soliton input pulse. amplitude (a0) and width (x0) belong to
// the fundamental soliton; n1 = 2 a0^2 x0 is its photon number.
struct SolitonSpec {
  int order = 1;
  double amplitude = 0.0;
  double width = 1.0;
  double n1 = 0.0;

  static SolitonSpec from_photon_number(int order, double n1, double width = 1.0);
  void validate() const;
};

// Physics parameters for a soliton run: |omega2| = 1 with the given sign,
// chi from the soliton existence condition a0^2 |chi_density| = |omega2|/x0^2
// (lattice-normalized), gamma in 1/t_d. linear=true switches the Kerr term
// off while keeping the same input pulse.
PhysicsParams soliton_params(const SolitonSpec& spec, const Grid& g, double omega2_sign,
                             double gamma, bool linear = false);

// First and second central moments of the lattice field in dimensionless
// mode normalization: normal(k,l) = <da_k^+ da_l>, anomalous(k,l) = <da_k da_l>.
struct GaussianState {
  Grid grid;
  VecC mean;
  MatC normal;
  MatC anomalous;
  double t = 0.0;

  static GaussianState vacuum(const Grid& g);
};

struct PhysicalityReport {
  bool pass = false;
  double min_eigenvalue = 0.0;
  double hermiticity_error = 0.0;
  double symmetry_error = 0.0;
};

// Coherent (vacuum-fluctuation) state with mean sqrt(dx) N a0 sech(x/x0).
GaussianState nsoliton_state(const Grid& g, const SolitonSpec& spec);

// Positive-semidefiniteness of [[N, conj(A)], [A, N^T + I]] together with
// Hermiticity/symmetry of the moment matrices; the eigenvalue threshold is
// -tol * max(1, trace N).
PhysicalityReport physicality_check(const GaussianState& s, double tol);

double total_photon_number(const GaussianState& s);

// Transmittance mask |g_k| <= 1, applied in the state's own domain. The
// beam-splitter vacuum port adds nothing to normally ordered moments.
struct FilterSpec {
  Domain domain = Domain::Position;
  VecC transmittance;

  // 1 on |coord - center| <= half_width (inclusive), 0 elsewhere.
  static FilterSpec square(const Grid& g, double center, double half_width);
  static FilterSpec uniform(const Grid& g, Complex value);
  void validate() const;
};

GaussianState apply_filter(const GaussianState& s, const FilterSpec& f);

// Moment transform under the unitary DFT: mean -> U mean,
// normal -> conj(U) normal U^T, anomalous -> U anomalous U^T.
GaussianState to_frequency_domain(const GaussianState& s);
GaussianState to_position_domain(const GaussianState& s);

}  // namespace qsol
