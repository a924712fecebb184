#pragma once

#include <string>
#include <vector>

namespace qsol {

// Caption-level run description. Lengths are in units of x0, times in units
// of t_d, frequencies in units of omega0 = 1/x0.
struct RunConfig {
  struct GridCfg {
    int M = 512;
    double L = 16.0;
  } grid;

  struct SolitonCfg {
    int order = 2;
    double n1 = 2e9;
  } soliton;

  struct PhysicsCfg {
    double omega2_sign = 1.0;
    double gamma_td = 0.0;
    bool linear = false;  // n1 -> infinity limit: Kerr term off, same pulse
  } physics;

  struct PropagationCfg {
    double t_end_td = 5.0;
    double dt_td = 0.0;  // 0 = stability-bound default
    std::vector<double> snapshot_times_td;  // empty = 41 uniform points
  } run;

  struct FilterCfg {
    double dx_width = 0.05;     // half-width of position-domain intervals
    double domega_width = 0.25; // half-width of frequency-domain intervals
  } filters;

  struct OptimizeCfg {
    bool enable = true;
    int min_width = 1;
  } optimize;

  struct OutputCfg {
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "eta-maps"};
  } output;

  void validate() const;
  std::vector<double> snapshot_times() const;

  // Sorted-key JSON dump; its FNV-1a hash identifies the run.
  std::string canonical_json() const;
  std::string config_hash() const;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_json_file(const std::string& path);
};

}  // namespace qsol
