#pragma once

#include <functional>
#include <vector>

#include "qsol/state.hpp"

namespace qsol {

// Time derivative of the moment blocks under the Gaussian cumulant closure
// of the damped Kerr lattice. dnormal is Hermitian and danomalous symmetric
// by construction.
struct MomentDerivative {
  VecC dmean;
  MatC dnormal;
  MatC danomalous;
};

MomentDerivative moment_rhs(const GaussianState& s, const PhysicsParams& p);

// Reusable integrator: owns the RK4 stage buffers so stepping is
// allocation-free.
class MomentIntegrator {
 public:
  explicit MomentIntegrator(const Grid& g);

  // One classical RK4 update in place; advances t by dt and re-symmetrizes
  // the moment matrices. Throws NumericalAbort on non-finite values or a
  // clearly negative fluctuation occupation.
  void step(GaussianState& s, const PhysicsParams& p, double dt);

  void rhs(const GaussianState& s, const PhysicsParams& p, MomentDerivative& out) const;

 private:
  MomentDerivative k_;
  GaussianState stage_;
  GaussianState acc_;
};

GaussianState rk4_step(const GaussianState& s, const PhysicsParams& p, double dt);

// min(0.25 dx^2/|omega2|, 0.05/(|chi| max_k W_k), 0.05/gamma), taking only
// the bounds whose term is active.
double default_dt(const GaussianState& s, const PhysicsParams& p);

using SnapshotFn = std::function<void(const GaussianState&, const PhysicalityReport&)>;

// Fixed-step propagation that lands exactly on each snapshot time (the last
// substep before a snapshot is shortened). Every emitted state must pass the
// physicality check; a failure aborts with the failing time.
void evolve(const GaussianState& s0, const PhysicsParams& p, double t_end, double dt,
            const std::vector<double>& snapshot_times, const SnapshotFn& on_snapshot);
std::vector<GaussianState> evolve(const GaussianState& s0, const PhysicsParams& p, double t_end,
                                  double dt, const std::vector<double>& snapshot_times);

// Mean-field-only evolution (fluctuations pinned at zero).
VecC classical_rhs(const Grid& g, const VecC& mean, const PhysicsParams& p);
VecC evolve_classical(const Grid& g, VecC mean, const PhysicsParams& p, double t_end, double dt);

}  // namespace qsol
