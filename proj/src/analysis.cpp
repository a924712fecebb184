#include "qsol/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace qsol {

IntervalSet IntervalSet::tiling(const Grid& g, int width) {
  if (width < 1) throw ConfigError("interval width must be >= 1");
  IntervalSet set;
  set.domain = g.domain;
  for (int lo = 0; lo < g.sites; lo += width) {
    const int hi = std::min(lo + width, g.sites);
    set.ranges.emplace_back(lo, hi);
  }
  return set;
}

IntervalSet IntervalSet::from_centers(const Grid& g, const std::vector<double>& centers,
                                      double half_width) {
  if (half_width < 0.0) throw ConfigError("interval half-width must be >= 0");
  IntervalSet set;
  set.domain = g.domain;
  for (double cen : centers) {
    int lo = -1, hi = -1;
    for (int k = 0; k < g.sites; ++k) {
      if (std::abs(g.coords[k] - cen) <= half_width) {
        if (lo < 0) lo = k;
        hi = k + 1;
      }
    }
    if (lo >= 0) set.ranges.emplace_back(lo, hi);
  }
  return set;
}

bool IntervalSet::pairwise_disjoint() const {
  auto sorted = ranges;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].first < sorted[i - 1].second) return false;
  return true;
}

void IntervalSet::validate(int sites) const {
  for (const auto& [lo, hi] : ranges)
    if (lo < 0 || lo >= hi || hi > sites)
      throw ContractViolation("interval outside the grid or empty");
  if (!allow_overlap && !pairwise_disjoint())
    throw ContractViolation("intervals overlap but overlap was not allowed");
}

double IntervalSet::center(const Grid& g, int i) const {
  const auto& [lo, hi] = ranges.at(i);
  double sum = 0.0;
  for (int k = lo; k < hi; ++k) sum += g.coords[k];
  return sum / (hi - lo);
}

LocalCorrelation pair_correlation_matrix(const GaussianState& s) {
  const int m = s.grid.sites;
  LocalCorrelation lc;
  lc.n_local.resize(m);
  lc.c_local.resize(m, m);
  for (int k = 0; k < m; ++k)
    lc.n_local[k] = std::norm(s.mean[k]) + s.normal(k, k).real();
  for (int l = 0; l < m; ++l) {
    const Complex ml = s.mean[l];
    for (int k = 0; k < m; ++k) {
      const Complex nkl = s.normal(k, l);
      const Complex akl = s.anomalous(k, l);
      const Complex mk = s.mean[k];
      lc.c_local(k, l) = 2.0 * (nkl * mk * std::conj(ml)).real() +
                         2.0 * (akl * std::conj(mk) * std::conj(ml)).real() +
                         std::norm(nkl) + std::norm(akl);
    }
  }
  return lc;
}

CorrelationStats interval_stats(const LocalCorrelation& lc, const IntervalSet& intervals,
                                double t) {
  const int sites = static_cast<int>(lc.n_local.size());
  intervals.validate(sites);
  const int n = static_cast<int>(intervals.ranges.size());

  CorrelationStats st;
  st.t = t;
  st.intervals = intervals;
  st.m.resize(n);
  st.c.resize(n, n);
  st.eta.resize(n, n);
  st.eta_defined.resize(n, n);
  st.fano.resize(n);
  st.fano_defined.assign(n, false);

  for (int i = 0; i < n; ++i) {
    const auto& [lo, hi] = intervals.ranges[i];
    double sum = 0.0;
    for (int k = lo; k < hi; ++k) sum += lc.n_local[k];
    st.m[i] = sum;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto& [ilo, ihi] = intervals.ranges[i];
      const auto& [jlo, jhi] = intervals.ranges[j];
      double sum = 0.0;
      for (int k = ilo; k < ihi; ++k)
        for (int l = jlo; l < jhi; ++l) sum += lc.c_local(k, l);
      st.c(i, j) = sum;
    }
  }

  const bool disjoint = intervals.pairwise_disjoint();
  for (int i = 0; i < n; ++i) {
    if (st.m[i] > 0.0) {
      st.fano[i] = 1.0 + st.c(i, i) / st.m[i];
      st.fano_defined[i] = true;
    } else {
      st.fano[i] = 0.0;
    }
    for (int j = 0; j < n; ++j) {
      const double denom = (st.c(i, i) + st.m[i]) * (st.c(j, j) + st.m[j]);
      if (denom > 0.0) {
        st.eta(i, j) = st.c(i, j) / std::sqrt(denom);
        st.eta_defined(i, j) = true;
        if (i == j)
          st.max_eta_diag = std::max(st.max_eta_diag, st.eta(i, i));
        else if (disjoint)
          st.max_abs_eta_offdiag = std::max(st.max_abs_eta_offdiag, std::abs(st.eta(i, j)));
      } else {
        st.eta(i, j) = 0.0;
        st.eta_defined(i, j) = false;
      }
    }
  }
  return st;
}

double cs_test(const CorrelationStats& stats, int i, int j) {
  if (i == j) throw ContractViolation("cs_test needs two distinct intervals");
  const auto& [ilo, ihi] = stats.intervals.ranges.at(i);
  const auto& [jlo, jhi] = stats.intervals.ranges.at(j);
  if (ilo < jhi && jlo < ihi)
    throw ContractViolation("cs_test requires disjoint intervals");
  return stats.c(i, i) * stats.c(j, j) - stats.c(i, j) * stats.c(i, j);
}

namespace {

// Inclusive-exclusive 2D prefix table: P(i,j) = sum of c over [0,i) x [0,j).
struct PrefixSums {
  VecR mass;   // mass(i) = sum of n_local over [0, i)
  MatR block;  // block(i,j) as above

  explicit PrefixSums(const LocalCorrelation& lc) {
    const int m = static_cast<int>(lc.n_local.size());
    mass = VecR::Zero(m + 1);
    for (int k = 0; k < m; ++k) mass[k + 1] = mass[k] + lc.n_local[k];
    block = MatR::Zero(m + 1, m + 1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        block(i + 1, j + 1) =
            lc.c_local(i, j) + block(i, j + 1) + block(i + 1, j) - block(i, j);
  }

  double interval_mass(int lo, int hi) const { return mass[hi] - mass[lo]; }
  double cross(int alo, int ahi, int blo, int bhi) const {
    return block(ahi, bhi) - block(alo, bhi) - block(ahi, blo) + block(alo, blo);
  }
  double self(int lo, int hi) const { return cross(lo, hi, lo, hi); }
};

}  // namespace

FanoOptimum optimize_fano_filter(const LocalCorrelation& lc, int min_width) {
  if (min_width < 1) throw ContractViolation("optimize_fano_filter: min_width must be >= 1");
  const int m = static_cast<int>(lc.n_local.size());
  PrefixSums ps(lc);

  FanoOptimum best;
  for (int lo = 0; lo < m; ++lo) {
    for (int hi = lo + min_width; hi <= m; ++hi) {
      const double mass = ps.interval_mass(lo, hi);
      if (!(mass > 0.0)) continue;
      const double fano = 1.0 + ps.self(lo, hi) / mass;
      if (!best.found || fano < best.fano ||
          (fano == best.fano && (lo < best.lo || (lo == best.lo && hi - lo < best.hi - best.lo)))) {
        best.found = true;
        best.lo = lo;
        best.hi = hi;
        best.fano = fano;
      }
    }
  }
  return best;
}

CsPairOptimum optimize_cs_pair(const LocalCorrelation& lc, int width) {
  if (width < 1) throw ContractViolation("optimize_cs_pair: width must be >= 1");
  const int m = static_cast<int>(lc.n_local.size());
  PrefixSums ps(lc);

  std::vector<double> self(std::max(0, m - width + 1));
  for (int lo = 0; lo + width <= m; ++lo) self[lo] = ps.self(lo, lo + width);

  CsPairOptimum best;
  for (int a = 0; a + width <= m; ++a) {
    for (int b = a + width; b + width <= m; ++b) {
      const double cij = ps.cross(a, a + width, b, b + width);
      const double d = self[a] * self[b] - cij * cij;
      if (!best.found || d < best.d ||
          (d == best.d && (a < best.i_lo || (a == best.i_lo && b < best.j_lo)))) {
        best.found = true;
        best.i_lo = a;
        best.i_hi = a + width;
        best.j_lo = b;
        best.j_hi = b + width;
        best.d = d;
        if (self[a] > 0.0 && self[b] > 0.0) {
          best.v_norm = cij * cij / (self[a] * self[b]);
          best.v_norm_defined = true;
        } else {
          best.v_norm = 0.0;
          best.v_norm_defined = false;
        }
      }
    }
  }
  return best;
}

double squeezing_db(double fano) {
  if (!(fano > 0.0)) throw ContractViolation("squeezing_db needs a positive Fano factor");
  return -10.0 * std::log10(fano);
}

}  // namespace qsol
