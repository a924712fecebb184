#pragma once

#include <utility>
#include <vector>

#include "qsol/state.hpp"

namespace qsol {

// Half-open site-index ranges [lo, hi) on a grid. Disjointness is required
// by the Cauchy-Schwarz test and the |eta_ij| <= 1 bound.
struct IntervalSet {
  Domain domain = Domain::Position;
  std::vector<std::pair<int, int>> ranges;
  bool allow_overlap = false;

  // Consecutive blocks of `width` sites covering the whole grid; the final
  // block keeps the remainder so the set is a full partition.
  static IntervalSet tiling(const Grid& g, int width);

  // Sites with |coord - center| <= half_width (inclusive) per center.
  static IntervalSet from_centers(const Grid& g, const std::vector<double>& centers,
                                  double half_width);

  bool pairwise_disjoint() const;
  void validate(int sites) const;
  double center(const Grid& g, int i) const;
};

// Per-site photon numbers and normally ordered pair covariances,
//   n_k = |m_k|^2 + N_kk
//   c_kl = 2 Re[N_kl m_k conj(m_l)] + 2 Re[A_kl conj(m_k) conj(m_l)]
//          + |N_kl|^2 + |A_kl|^2
// (Wick factorization of <:dn_k dn_l:> for a Gaussian state).
struct LocalCorrelation {
  VecR n_local;
  MatR c_local;
};

LocalCorrelation pair_correlation_matrix(const GaussianState& s);

// Interval sums of the local statistics: m_i, c_ij, eta_ij, Fano factors.
// Entries whose denominators vanish are flagged undefined instead of
// propagating NaN.
struct CorrelationStats {
  double t = 0.0;
  IntervalSet intervals;
  VecR m;
  MatR c;
  MatR eta;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> eta_defined;
  VecR fano;
  std::vector<bool> fano_defined;

  // Worst-case diagnostics for the eta bounds (eta_ii <= 1 always,
  // |eta_ij| <= 1 when the set is disjoint).
  double max_eta_diag = 0.0;
  double max_abs_eta_offdiag = 0.0;
};

CorrelationStats interval_stats(const LocalCorrelation& lc, const IntervalSet& intervals,
                                double t = 0.0);

// c_ii c_jj - c_ij^2; negative certifies nonclassical correlation.
double cs_test(const CorrelationStats& stats, int i, int j);

struct FanoOptimum {
  bool found = false;
  int lo = 0, hi = 0;
  double fano = 1.0;
};

// Exhaustive search over contiguous intervals [lo, hi), hi - lo >= min_width,
// minimizing F = 1 + C/mass. Prefix sums make the search O(M^2). Ties break
// to smaller lo, then smaller width.
FanoOptimum optimize_fano_filter(const LocalCorrelation& lc, int min_width);

struct CsPairOptimum {
  bool found = false;
  int i_lo = 0, i_hi = 0, j_lo = 0, j_hi = 0;
  double d = 0.0;
  double v_norm = 0.0;
  bool v_norm_defined = false;
};

// Most negative D = c_ii c_jj - c_ij^2 over ordered pairs of disjoint
// equal-width intervals; v_norm = c_ij^2/(c_ii c_jj) where both variances
// are positive.
CsPairOptimum optimize_cs_pair(const LocalCorrelation& lc, int width);

// -10 log10(F); positive for sub-Poissonian light.
double squeezing_db(double fano);

}  // namespace qsol
