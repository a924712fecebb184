#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qsol/analysis.hpp"
#include "qsol/propagator.hpp"
#include "qsol/run_config.hpp"

namespace qsol {

// Number of sites a square bandpass of half-width `half_width` covers on a
// grid with the given spacing (full width 2*half_width, at least one site).
int sites_for_half_width(double half_width, double spacing);

struct AnalysisOptions {
  double dx_width = 0.05;
  double domega_width = 0.25;
  bool optimize = true;
  int min_width = 1;
};

struct DomainAnalysis {
  CorrelationStats stats;
  std::vector<double> centers;
  int tile_width = 1;
  FanoOptimum fano;
  CsPairOptimum cs;
};

struct SnapshotAnalysis {
  double t = 0.0;
  double total_photon = 0.0;
  PhysicalityReport physicality;
  DomainAnalysis position;
  DomainAnalysis frequency;
  double identity_max_dev = 0.0;  // worst |F - (1-eta_ii)^-1| / F
};

// Full per-snapshot pipeline: position statistics, DFT, frequency
// statistics, optional filter searches.
SnapshotAnalysis analyze_snapshot(const GaussianState& position_state,
                                  const AnalysisOptions& opt);

struct RunSummary {
  std::vector<SnapshotAnalysis> snapshots;
  double dt = 0.0;
  double initial_photon = 0.0;
  std::string output_directory;
  bool aborted = false;
  double abort_time = 0.0;
};

// simulate: propagate, analyze every snapshot, write CSV/map/manifest
// outputs. Deterministic: identical configs produce byte-identical CSVs.
// A propagation abort is recorded in the manifest and rethrown.
RunSummary run_simulate(const RunConfig& cfg);

// analyze/optimize: rerun the per-snapshot pipeline on saved snapshots.
RunSummary run_analyze(const std::vector<std::string>& snapshot_paths, const RunConfig& cfg,
                       bool optimizers_only);

struct OracleValidateConfig {
  int sites = 2;
  int cutoff = 12;
  double alpha2 = 0.5;  // photons per site of the coherent input
  double omega2 = 1.0;
  double dx = 1.0;
  double chi = 0.2;   // lattice Kerr constant
  double gamma = 0.0;
  double t_end = 0.5;
  double dt = 1e-3;
  int report_points = 10;

  void validate() const;
};

// Side-by-side Gaussian vs exact-master-equation run. Returns nonzero if a
// discrepancy exceeds 1e-3 inside the controlled window (chi*t <= 0.03 and
// gamma*t <= 0.03); deviations beyond the window only warn.
int run_oracle_validate(const OracleValidateConfig& cfg, std::ostream& report);

struct ClassicalResult {
  double recurrence_linf = 0.0;  // L-inf deviation of |mean|^2 from t=0, peak-relative
};

// Mean-field-only run; writes intensity profiles plus the recurrence metric.
ClassicalResult run_classical(const RunConfig& cfg);

}  // namespace qsol
