#pragma once

#include <utility>
#include <vector>

#include "qsol/state.hpp"

namespace qsol {

// Brute-force master-equation machinery on a tiny lattice (<= 3 sites,
// truncated Fock space). Test/validation dependency only; never touched by
// the production propagation path.
struct FockOperators {
  int sites = 0;
  int cutoff = 0;
  int dim = 0;
  double dx = 1.0;
  PhysicsParams params;
  std::vector<MatC> lower;  // per-site annihilation operators
  MatC hamiltonian;
};

// Hamiltonian = -(omega2/2) sum_kl Lap_kl a_k^+ a_l + (chi/2) sum_k a_k^+2 a_k^2
// with the same periodic Laplacian the Gaussian propagator uses.
FockOperators build_operators(int sites, int cutoff, double dx, const PhysicsParams& p);

struct FockOracleState {
  int sites = 0;
  int cutoff = 0;
  MatC rho;
  double t = 0.0;
};

// Product coherent state. Amplitudes are limited to |alpha|^2 <= 1 so the
// cutoff-12 truncation error stays below 1e-8.
FockOracleState coherent_oracle_state(int sites, int cutoff, const VecC& amplitudes);

// Single-site thermal state with mean occupation nbar.
FockOracleState thermal_oracle_state(int cutoff, double nbar);

// RK4 on the full Liouvillian; Hermiticity re-enforced every step, trace
// drift beyond 1e-6 aborts.
void evolve_density(FockOracleState& st, const FockOperators& ops, double t_end, double dt);

struct ExtractedMoments {
  VecC mean;
  MatC normal;
  MatC anomalous;
};

ExtractedMoments extract_moments(const FockOracleState& st, const FockOperators& ops);

// Direct trace evaluations for validating the Wick-based analysis formulas.
double interval_mean_direct(const FockOracleState& st, const FockOperators& ops,
                            std::pair<int, int> range);
double interval_ncov_direct(const FockOracleState& st, const FockOperators& ops,
                            std::pair<int, int> range_i, std::pair<int, int> range_j);

}  // namespace qsol
