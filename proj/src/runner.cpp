#include "qsol/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

#include <json.hpp>

#include "qsol/fock_oracle.hpp"
#include "qsol/snapshot_io.hpp"
#include "qsol/text_format.hpp"

namespace qsol {

namespace fs = std::filesystem;
using nlohmann::json;

int sites_for_half_width(double half_width, double spacing) {
  return std::max(1, static_cast<int>(std::llround(2.0 * half_width / spacing)));
}

namespace {

std::string index_tag(int idx) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", idx);
  return buf;
}

double identity_deviation(const CorrelationStats& st) {
  double worst = 0.0;
  for (int i = 0; i < st.m.size(); ++i) {
    if (!st.fano_defined[i] || !st.eta_defined(i, i)) continue;
    const double one_minus = 1.0 - st.eta(i, i);
    if (one_minus == 0.0) continue;
    const double via_eta = 1.0 / one_minus;
    worst = std::max(worst, std::abs(st.fano[i] - via_eta) / std::max(std::abs(st.fano[i]), 1e-300));
  }
  return worst;
}

DomainAnalysis analyze_domain(const GaussianState& s, double half_width, bool optimize,
                              int min_width) {
  DomainAnalysis da;
  da.tile_width = sites_for_half_width(half_width, s.grid.spacing);
  const LocalCorrelation lc = pair_correlation_matrix(s);
  const IntervalSet tiles = IntervalSet::tiling(s.grid, da.tile_width);
  da.stats = interval_stats(lc, tiles, s.t);
  da.centers.reserve(tiles.ranges.size());
  for (std::size_t i = 0; i < tiles.ranges.size(); ++i)
    da.centers.push_back(tiles.center(s.grid, static_cast<int>(i)));
  if (optimize) {
    da.fano = optimize_fano_filter(lc, min_width);
    da.cs = optimize_cs_pair(lc, da.tile_width);
  }
  return da;
}

SnapshotAnalysis analyze_with_report(const GaussianState& s, const AnalysisOptions& opt,
                                     const PhysicalityReport& rep) {
  SnapshotAnalysis sa;
  sa.t = s.t;
  sa.total_photon = total_photon_number(s);
  sa.physicality = rep;
  sa.position = analyze_domain(s, opt.dx_width, opt.optimize, opt.min_width);
  const GaussianState fstate = to_frequency_domain(s);
  sa.frequency = analyze_domain(fstate, opt.domega_width, opt.optimize, opt.min_width);
  sa.identity_max_dev =
      std::max(identity_deviation(sa.position.stats), identity_deviation(sa.frequency.stats));
  return sa;
}

// Append-only CSV/map writer with a fixed column contract; every float is
// printed with %.17g so reruns are byte-identical.
class OutputWriter {
 public:
  OutputWriter(const fs::path& dir, const std::vector<std::string>& formats, bool optimize,
               double gamma, double initial_photon)
      : dir_(dir), gamma_(gamma), initial_photon_(initial_photon) {
    for (const auto& f : formats) {
      if (f == "csv") csv_ = true;
      if (f == "eta-maps") maps_ = true;
      if (f == "snapshots") snaps_ = true;
    }
    fs::create_directories(dir_);
    if (snaps_) fs::create_directories(dir_ / "snapshots");
    if (csv_) {
      open(mean_x_, "mean_photon_x.csv", "t_over_td,interval_center,value");
      open(mean_w_, "mean_photon_omega.csv", "t_over_td,interval_center,value");
      open(eta_x_, "eta_ii_x.csv", "t_over_td,interval_center,value");
      open(eta_w_, "eta_ii_omega.csv", "t_over_td,interval_center,value");
      open(total_, "total_photon.csv", "t_over_td,total,expected_decay,rel_dev");
      if (optimize) {
        open(fano_x_, "optimized_fano_x.csv", "t_over_td,fano_min,squeezing_db,lo,hi");
        open(fano_w_, "optimized_fano_omega.csv", "t_over_td,fano_min,squeezing_db,lo,hi");
        open(cs_x_, "cs_opt_x.csv", "t_over_td,d_min,v_norm,i_lo,i_hi,j_lo,j_hi");
        open(cs_w_, "cs_opt_omega.csv", "t_over_td,d_min,v_norm,i_lo,i_hi,j_lo,j_hi");
      }
    }
  }

  void write(const SnapshotAnalysis& sa, const GaussianState* state) {
    if (csv_) {
      write_curves(mean_x_, eta_x_, sa.t, sa.position);
      write_curves(mean_w_, eta_w_, sa.t, sa.frequency);
      const double expected = std::exp(-2.0 * gamma_ * sa.t);
      const double rel =
          std::abs(sa.total_photon - initial_photon_ * expected) /
          std::max(initial_photon_ * expected, 1e-300);
      total_ << fmt_g17(sa.t) << ',' << fmt_g17(sa.total_photon) << ','
             << fmt_g17(expected) << ',' << fmt_g17(rel) << '\n';
      if (fano_x_.is_open()) {
        write_fano(fano_x_, sa.t, sa.position.fano);
        write_fano(fano_w_, sa.t, sa.frequency.fano);
        write_cs(cs_x_, sa.t, sa.position.cs);
        write_cs(cs_w_, sa.t, sa.frequency.cs);
      }
    }
    if (maps_) {
      write_map("eta_map_x_" + index_tag(index_) + ".txt", sa, sa.position);
      write_map("eta_map_omega_" + index_tag(index_) + ".txt", sa, sa.frequency);
    }
    if (snaps_ && state)
      save_snapshot(*state, (dir_ / "snapshots" / ("snap_" + index_tag(index_) + ".qsnap")).string());
    ++index_;
  }

  int grid_sites = 0;  // recorded into map headers

 private:
  void open(std::ofstream& f, const std::string& name, const std::string& header) {
    f.open(dir_ / name, std::ios::trunc);
    if (!f) throw ConfigError("cannot open output file: " + (dir_ / name).string());
    f << header << '\n';
  }

  void write_curves(std::ofstream& mean, std::ofstream& eta, double t, const DomainAnalysis& da) {
    const auto n = da.stats.m.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      mean << fmt_g17(t) << ',' << fmt_g17(da.centers[i]) << ',' << fmt_g17(da.stats.m[i]) << '\n';
      eta << fmt_g17(t) << ',' << fmt_g17(da.centers[i]) << ','
          << (da.stats.eta_defined(i, i) ? fmt_g17(da.stats.eta(i, i)) : "nan") << '\n';
    }
  }

  void write_fano(std::ofstream& f, double t, const FanoOptimum& opt) {
    if (!opt.found) {
      f << fmt_g17(t) << ",nan,nan,0,0\n";
      return;
    }
    f << fmt_g17(t) << ',' << fmt_g17(opt.fano) << ','
      << (opt.fano > 0.0 ? fmt_g17(squeezing_db(opt.fano)) : "nan") << ',' << opt.lo << ','
      << opt.hi << '\n';
  }

  void write_cs(std::ofstream& f, double t, const CsPairOptimum& opt) {
    if (!opt.found) {
      f << fmt_g17(t) << ",nan,nan,0,0,0,0\n";
      return;
    }
    f << fmt_g17(t) << ',' << fmt_g17(opt.d) << ','
      << (opt.v_norm_defined ? fmt_g17(opt.v_norm) : "nan") << ',' << opt.i_lo << ',' << opt.i_hi
      << ',' << opt.j_lo << ',' << opt.j_hi << '\n';
  }

  void write_map(const std::string& name, const SnapshotAnalysis& sa, const DomainAnalysis& da) {
    std::ofstream f(dir_ / name, std::ios::trunc);
    if (!f) throw ConfigError("cannot open output file: " + (dir_ / name).string());
    const auto n = da.stats.eta.rows();
    f << grid_sites << ' ' << n << ' ' << n << ' ' << fmt_g17(sa.t) << '\n';
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j) f << ' ';
        f << (da.stats.eta_defined(i, j) ? fmt_g17(da.stats.eta(i, j)) : "nan");
      }
      f << '\n';
    }
  }

  fs::path dir_;
  bool csv_ = false, maps_ = false, snaps_ = false;
  double gamma_ = 0.0;
  double initial_photon_ = 0.0;
  int index_ = 0;
  std::ofstream mean_x_, mean_w_, eta_x_, eta_w_, total_, fano_x_, fano_w_, cs_x_, cs_w_;
};

fs::path effective_output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("QSOL_OUTPUT_DIR"); env && *env) return fs::path(env);
  return fs::path(cfg.output.directory);
}

json snapshot_manifest_entry(const SnapshotAnalysis& sa, double gamma, double initial_photon) {
  const double expected = initial_photon * std::exp(-2.0 * gamma * sa.t);
  json j;
  j["t_over_td"] = sa.t;
  j["total_photon"] = sa.total_photon;
  j["expected_decay_total"] = expected;
  j["decay_rel_dev"] = std::abs(sa.total_photon - expected) / std::max(expected, 1e-300);
  j["physicality_min_eigenvalue"] = sa.physicality.min_eigenvalue;
  j["physicality_pass"] = sa.physicality.pass;
  j["eta_max_diag_x"] = sa.position.stats.max_eta_diag;
  j["eta_max_offdiag_x"] = sa.position.stats.max_abs_eta_offdiag;
  j["eta_max_diag_omega"] = sa.frequency.stats.max_eta_diag;
  j["eta_max_offdiag_omega"] = sa.frequency.stats.max_abs_eta_offdiag;
  j["fano_eta_identity_max_dev"] = sa.identity_max_dev;
  return j;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                    const RunSummary& sum, double wall_seconds) {
  json j;
  j["tool"] = "qsol";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = json::parse(cfg.canonical_json());
  j["config_hash"] = cfg.config_hash();
  j["float_format"] = kFloatFormat;
  j["dt_td"] = sum.dt;
  j["initial_total_photon"] = sum.initial_photon;
  j["wall_time_seconds"] = wall_seconds;
  j["exit"] = sum.aborted ? "numerical_abort" : "ok";
  if (sum.aborted) j["abort_time_td"] = sum.abort_time;

  bool all_physical = true, eta_ok = true, identity_ok = true;
  json snaps = json::array();
  for (const auto& sa : sum.snapshots) {
    snaps.push_back(snapshot_manifest_entry(sa, cfg.physics.gamma_td, sum.initial_photon));
    all_physical = all_physical && sa.physicality.pass;
    const double slack = 1.0 + 1e-9;
    eta_ok = eta_ok && sa.position.stats.max_eta_diag <= slack &&
             sa.position.stats.max_abs_eta_offdiag <= slack &&
             sa.frequency.stats.max_eta_diag <= slack &&
             sa.frequency.stats.max_abs_eta_offdiag <= slack;
    identity_ok = identity_ok && sa.identity_max_dev <= 1e-12;
  }
  j["snapshots"] = snaps;
  j["invariants"]["all_snapshots_physical"] = all_physical;
  j["invariants"]["eta_bounds_ok"] = eta_ok;
  j["invariants"]["fano_eta_identity_ok"] = identity_ok;

  std::ofstream f(dir / "manifest.json", std::ios::trunc);
  if (!f) throw ConfigError("cannot write manifest: " + (dir / "manifest.json").string());
  f << j.dump(2) << '\n';
}

}  // namespace

SnapshotAnalysis analyze_snapshot(const GaussianState& position_state,
                                  const AnalysisOptions& opt) {
  const double trace = position_state.normal.diagonal().real().sum();
  const PhysicalityReport rep = physicality_check(position_state, trace < 1.0 ? 1e-10 : 1e-6);
  return analyze_with_report(position_state, opt, rep);
}

RunSummary run_simulate(const RunConfig& cfg) {
  cfg.validate();
  const fs::path dir = effective_output_dir(cfg);
  const auto t_start = std::chrono::steady_clock::now();

  const Grid grid = build_grid(cfg.grid.M, cfg.grid.L);
  const SolitonSpec spec = SolitonSpec::from_photon_number(cfg.soliton.order, cfg.soliton.n1);
  const PhysicsParams params =
      soliton_params(spec, grid, cfg.physics.omega2_sign, cfg.physics.gamma_td, cfg.physics.linear);
  const GaussianState state0 = nsoliton_state(grid, spec);

  RunSummary sum;
  sum.output_directory = dir.string();
  sum.dt = cfg.run.dt_td > 0.0 ? cfg.run.dt_td : default_dt(state0, params);
  sum.initial_photon = total_photon_number(state0);

  const AnalysisOptions aopt{cfg.filters.dx_width, cfg.filters.domega_width,
                             cfg.optimize.enable, cfg.optimize.min_width};
  OutputWriter writer(dir, cfg.output.formats, cfg.optimize.enable, cfg.physics.gamma_td,
                      sum.initial_photon);
  writer.grid_sites = grid.sites;
  const bool keep_states =
      std::find(cfg.output.formats.begin(), cfg.output.formats.end(), "snapshots") !=
      cfg.output.formats.end();

  auto wall = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };
  try {
    evolve(state0, params, cfg.run.t_end_td, sum.dt, cfg.snapshot_times(),
           [&](const GaussianState& s, const PhysicalityReport& rep) {
             SnapshotAnalysis sa = analyze_with_report(s, aopt, rep);
             writer.write(sa, keep_states ? &s : nullptr);
             sum.snapshots.push_back(std::move(sa));
           });
  } catch (const NumericalAbort& e) {
    sum.aborted = true;
    sum.abort_time = e.t_fail;
    write_manifest(dir, "simulate", cfg, sum, wall());
    throw;
  }
  write_manifest(dir, "simulate", cfg, sum, wall());
  return sum;
}

RunSummary run_analyze(const std::vector<std::string>& snapshot_paths, const RunConfig& cfg,
                       bool optimizers_only) {
  if (snapshot_paths.empty()) throw ConfigError("no snapshot files given");
  const fs::path dir = effective_output_dir(cfg);
  const auto t_start = std::chrono::steady_clock::now();

  RunSummary sum;
  sum.output_directory = dir.string();

  std::vector<std::string> formats = cfg.output.formats;
  if (optimizers_only) formats = {"csv"};
  const AnalysisOptions aopt{cfg.filters.dx_width, cfg.filters.domega_width,
                             optimizers_only ? true : cfg.optimize.enable,
                             cfg.optimize.min_width};

  bool first = true;
  OutputWriter* writer = nullptr;
  std::unique_ptr<OutputWriter> holder;
  for (const auto& path : snapshot_paths) {
    GaussianState s = load_snapshot(path);
    if (s.grid.domain != Domain::Position)
      throw ConfigError("snapshot is not position-domain: " + path);
    if (first) {
      sum.initial_photon = total_photon_number(s);
      holder = std::make_unique<OutputWriter>(dir, formats, aopt.optimize, cfg.physics.gamma_td,
                                              sum.initial_photon);
      holder->grid_sites = s.grid.sites;
      writer = holder.get();
      first = false;
    }
    SnapshotAnalysis sa = analyze_snapshot(s, aopt);
    writer->write(sa, nullptr);
    sum.snapshots.push_back(std::move(sa));
  }
  write_manifest(dir, optimizers_only ? "optimize" : "analyze", cfg, sum,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count());
  return sum;
}

void OracleValidateConfig::validate() const {
  if (sites < 1 || sites > 2) throw ConfigError("oracle-validate supports 1 or 2 sites");
  if (cutoff < 2) throw ConfigError("cutoff must be >= 2");
  if (!(alpha2 >= 0.0) || alpha2 > 1.0)
    throw ConfigError("oracle amplitudes are limited to |alpha|^2 <= 1");
  if (!(dx > 0.0) || !(t_end > 0.0) || !(dt > 0.0))
    throw ConfigError("dx, t_end and dt must be positive");
  if (gamma < 0.0) throw ConfigError("gamma must be >= 0");
  if (report_points < 1) throw ConfigError("report_points must be >= 1");
}

namespace {

Grid tiny_grid(int sites, double dx) {
  // The Fock oracle allows a single site; build_grid's M >= 2 contract is
  // for production grids, so assemble the degenerate case by hand.
  if (sites >= 2) return build_grid(sites, dx * sites);
  Grid g;
  g.sites = 1;
  g.length = dx;
  g.spacing = dx;
  g.domain = Domain::Position;
  g.coords = VecR::Zero(1);
  return g;
}

double max_rel_error(const MatC& got, const MatC& expected) {
  const double scale = expected.cwiseAbs().maxCoeff();
  if (scale <= 0.0) return got.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < expected.cols(); ++j)
    for (Eigen::Index i = 0; i < expected.rows(); ++i) {
      const double mag = std::abs(expected(i, j));
      if (mag <= 1e-9 * scale) continue;  // below significance: noise floor
      worst = std::max(worst, std::abs(got(i, j) - expected(i, j)) / mag);
    }
  return worst;
}

}  // namespace

int run_oracle_validate(const OracleValidateConfig& cfg, std::ostream& report) {
  cfg.validate();
  PhysicsParams params;
  params.omega2 = cfg.omega2;
  params.chi = cfg.chi;
  params.gamma = cfg.gamma;
  params.validate();

  const FockOperators ops = build_operators(cfg.sites, cfg.cutoff, cfg.dx, params);
  const double hnorm = ops.hamiltonian.cwiseAbs().rowwise().sum().maxCoeff();
  if (cfg.dt * hnorm > 0.1)
    throw ConfigError("dt too large for the oracle: dt*||H|| = " + fmt_g17(cfg.dt * hnorm));

  const VecC amps = VecC::Constant(cfg.sites, std::sqrt(cfg.alpha2));
  FockOracleState fock = coherent_oracle_state(cfg.sites, cfg.cutoff, amps);

  const Grid grid = tiny_grid(cfg.sites, cfg.dx);
  GaussianState gauss = GaussianState::vacuum(grid);
  gauss.mean = amps;
  MomentIntegrator integ(grid);

  report << "# oracle-validate sites=" << cfg.sites << " cutoff=" << cfg.cutoff
         << " alpha2=" << fmt_g17(cfg.alpha2) << " chi=" << fmt_g17(cfg.chi)
         << " gamma=" << fmt_g17(cfg.gamma) << " dx=" << fmt_g17(cfg.dx) << "\n";
  report << "# controlled window: chi*t <= 0.03 and gamma*t <= 0.03 (gate 1e-3)\n";
  report << "t,chi_t,rel_mean,rel_normal,rel_anomalous,rel_wick_c,status\n";

  bool failed = false;
  int warnings = 0;
  for (int i = 1; i <= cfg.report_points; ++i) {
    const double target = cfg.t_end * i / cfg.report_points;
    while (gauss.t < target - 1e-12) integ.step(gauss, params, std::min(cfg.dt, target - gauss.t));
    gauss.t = target;
    evolve_density(fock, ops, target, cfg.dt);

    const ExtractedMoments em = extract_moments(fock, ops);
    const double rel_mean = max_rel_error(gauss.mean, em.mean);
    const double rel_n = max_rel_error(gauss.normal, em.normal);
    const double rel_a = max_rel_error(gauss.anomalous, em.anomalous);

    // Wick pair-covariance formula against the direct trace, on the exact
    // moments so only the Gaussian factorization itself is probed.
    GaussianState from_oracle = GaussianState::vacuum(grid);
    from_oracle.mean = em.mean;
    from_oracle.normal = em.normal;
    from_oracle.anomalous = em.anomalous;
    const LocalCorrelation lc = pair_correlation_matrix(from_oracle);
    double rel_c = 0.0;
    for (int k = 0; k < cfg.sites; ++k)
      for (int l = 0; l < cfg.sites; ++l) {
        const double direct = interval_ncov_direct(fock, ops, {k, k + 1}, {l, l + 1});
        const double denom = std::max(std::abs(direct), 1e-9 * lc.c_local.cwiseAbs().maxCoeff());
        if (denom > 0.0)
          rel_c = std::max(rel_c, std::abs(lc.c_local(k, l) - direct) / denom);
      }

    const bool in_window =
        std::abs(cfg.chi) * target <= 0.03 + 1e-12 && cfg.gamma * target <= 0.03 + 1e-12;
    const double worst = std::max({rel_mean, rel_n, rel_a, rel_c});
    std::string status = "ok";
    if (worst > 1e-3) {
      if (in_window) {
        status = "FAIL";
        failed = true;
      } else {
        status = "warn(outside-window)";
        ++warnings;
      }
    }
    report << fmt_g17(target) << ',' << fmt_g17(std::abs(cfg.chi) * target) << ','
           << fmt_g17(rel_mean) << ',' << fmt_g17(rel_n) << ',' << fmt_g17(rel_a) << ','
           << fmt_g17(rel_c) << ',' << status << '\n';
  }
  if (warnings)
    report << "# " << warnings
           << " point(s) deviate beyond 1e-3 outside the controlled window; expected for a "
              "second-cumulant closure\n";
  report << (failed ? "# RESULT: FAIL\n" : "# RESULT: pass\n");
  return failed ? 1 : 0;
}

ClassicalResult run_classical(const RunConfig& cfg) {
  cfg.validate();
  const fs::path dir = effective_output_dir(cfg);
  fs::create_directories(dir);

  const Grid grid = build_grid(cfg.grid.M, cfg.grid.L);
  const SolitonSpec spec = SolitonSpec::from_photon_number(cfg.soliton.order, cfg.soliton.n1);
  const PhysicsParams params =
      soliton_params(spec, grid, cfg.physics.omega2_sign, cfg.physics.gamma_td, cfg.physics.linear);
  const GaussianState s0 = nsoliton_state(grid, spec);
  const double dt = cfg.run.dt_td > 0.0 ? cfg.run.dt_td : default_dt(s0, params);

  const VecR intensity0 = s0.mean.cwiseAbs2().real() / grid.spacing;
  const double peak0 = intensity0.maxCoeff();

  std::ofstream rec(dir / "recurrence.csv", std::ios::trunc);
  if (!rec) throw ConfigError("cannot open recurrence.csv");
  rec << "t_over_td,linf_rel_dev\n";

  VecC mean = s0.mean;
  double t = 0.0;
  int idx = 0;
  ClassicalResult result;
  for (double target : cfg.snapshot_times()) {
    if (target > t) {
      mean = evolve_classical(grid, mean, params, target - t, dt);
      t = target;
    }
    const VecR intensity = mean.cwiseAbs2().real() / grid.spacing;
    std::ofstream prof(dir / ("intensity_" + index_tag(idx) + ".csv"), std::ios::trunc);
    prof << "x,intensity\n";
    for (int k = 0; k < grid.sites; ++k)
      prof << fmt_g17(grid.coords[k]) << ',' << fmt_g17(intensity[k]) << '\n';
    const double linf = (intensity - intensity0).cwiseAbs().maxCoeff() / peak0;
    rec << fmt_g17(t) << ',' << fmt_g17(linf) << '\n';
    result.recurrence_linf = linf;
    ++idx;
  }
  return result;
}

}  // namespace qsol
