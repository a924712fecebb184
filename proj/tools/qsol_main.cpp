#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsol/runner.hpp"
#include "qsol/text_format.hpp"

namespace {

struct RunArgs {
  std::string config_path;
  std::optional<int> grid_m;
  std::optional<double> grid_l;
  std::optional<int> order;
  std::optional<double> n1;
  std::optional<double> omega2_sign;
  std::optional<double> gamma_td;
  std::optional<bool> linear;
  std::optional<double> t_end;
  std::optional<double> dt;
  std::vector<double> snapshots;
  std::optional<double> dx_width;
  std::optional<double> domega_width;
  std::optional<bool> opt_enable;
  std::optional<int> min_width;
  std::optional<std::string> out_dir;
  std::vector<std::string> formats;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON config file (CLI flags override it)");
  cmd->add_option("--grid.M", a.grid_m, "lattice sites");
  cmd->add_option("--grid.L", a.grid_l, "domain length in units of x0");
  cmd->add_option("--soliton.order", a.order, "soliton order N");
  cmd->add_option("--soliton.n1", a.n1, "photon number of the fundamental soliton");
  cmd->add_option("--physics.omega2_sign", a.omega2_sign, "sign of the dispersion constant");
  cmd->add_option("--physics.gamma_td", a.gamma_td, "damping constant in 1/t_d");
  cmd->add_option("--physics.linear", a.linear, "disable the Kerr term (n1 -> infinity limit)");
  cmd->add_option("--run.t_end_td", a.t_end, "propagation horizon in t_d");
  cmd->add_option("--run.dt_td", a.dt, "step size in t_d (0 = stability default)");
  cmd->add_option("--run.snapshot_times_td", a.snapshots, "snapshot times in t_d")
      ->delimiter(',');
  cmd->add_option("--filters.dx_width", a.dx_width, "x-domain filter half-width (x0)");
  cmd->add_option("--filters.domega_width", a.domega_width,
                  "omega-domain filter half-width (omega0)");
  cmd->add_option("--optimize.enable", a.opt_enable, "run the filter optimizers per snapshot");
  cmd->add_option("--optimize.min_width", a.min_width, "minimum optimizer interval width");
  cmd->add_option("--output.directory", a.out_dir, "output directory");
  cmd->add_option("--output.formats", a.formats, "csv,eta-maps,snapshots")->delimiter(',');
}

qsol::RunConfig build_config(const RunArgs& a) {
  qsol::RunConfig cfg;
  if (!a.config_path.empty()) cfg = qsol::RunConfig::from_json_file(a.config_path);
  if (a.grid_m) cfg.grid.M = *a.grid_m;
  if (a.grid_l) cfg.grid.L = *a.grid_l;
  if (a.order) cfg.soliton.order = *a.order;
  if (a.n1) cfg.soliton.n1 = *a.n1;
  if (a.omega2_sign) cfg.physics.omega2_sign = *a.omega2_sign;
  if (a.gamma_td) cfg.physics.gamma_td = *a.gamma_td;
  if (a.linear) cfg.physics.linear = *a.linear;
  if (a.t_end) cfg.run.t_end_td = *a.t_end;
  if (a.dt) cfg.run.dt_td = *a.dt;
  if (!a.snapshots.empty()) cfg.run.snapshot_times_td = a.snapshots;
  if (a.dx_width) cfg.filters.dx_width = *a.dx_width;
  if (a.domega_width) cfg.filters.domega_width = *a.domega_width;
  if (a.opt_enable) cfg.optimize.enable = *a.opt_enable;
  if (a.min_width) cfg.optimize.min_width = *a.min_width;
  if (a.out_dir) cfg.output.directory = *a.out_dir;
  if (!a.formats.empty()) cfg.output.formats = a.formats;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum statistics of damped N-soliton pulses (Gaussian moment propagation)"};
  app.require_subcommand(1);

  RunArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "propagate and analyze a soliton run");
  add_run_options(sim, sim_args);

  RunArgs ana_args;
  std::vector<std::string> ana_snapshots;
  CLI::App* ana = app.add_subcommand("analyze", "re-analyze saved snapshot files");
  add_run_options(ana, ana_args);
  ana->add_option("--snapshots", ana_snapshots, "snapshot files (*.qsnap)")
      ->required()
      ->delimiter(',');

  RunArgs opt_args;
  std::vector<std::string> opt_snapshots;
  CLI::App* opt = app.add_subcommand("optimize", "filter searches on saved snapshots");
  add_run_options(opt, opt_args);
  opt->add_option("--snapshots", opt_snapshots, "snapshot files (*.qsnap)")
      ->required()
      ->delimiter(',');

  qsol::OracleValidateConfig ocfg;
  CLI::App* orc = app.add_subcommand("oracle-validate",
                                     "Gaussian closure vs exact master equation on a tiny lattice");
  orc->add_option("--sites", ocfg.sites, "lattice sites (1 or 2)");
  orc->add_option("--cutoff", ocfg.cutoff, "Fock cutoff per site");
  orc->add_option("--alpha2", ocfg.alpha2, "photons per site of the coherent input (<= 1)");
  orc->add_option("--omega2", ocfg.omega2, "dispersion constant");
  orc->add_option("--dx", ocfg.dx, "lattice spacing");
  orc->add_option("--chi", ocfg.chi, "lattice Kerr constant");
  orc->add_option("--gamma", ocfg.gamma, "damping constant");
  orc->add_option("--t-end", ocfg.t_end, "comparison horizon");
  orc->add_option("--dt", ocfg.dt, "integrator step");
  orc->add_option("--report-points", ocfg.report_points, "number of comparison times");

  RunArgs cls_args;
  CLI::App* cls = app.add_subcommand("classical", "mean-field-only evolution (breather checks)");
  add_run_options(cls, cls_args);

  try {
    app.parse(argc, argv);

    if (sim->parsed()) {
      const qsol::RunSummary sum = qsol::run_simulate(build_config(sim_args));
      std::cout << "wrote " << sum.output_directory << " (" << sum.snapshots.size()
                << " snapshots, dt=" << qsol::fmt_g17(sum.dt) << " t_d)\n";
    } else if (ana->parsed()) {
      const qsol::RunSummary sum = qsol::run_analyze(ana_snapshots, build_config(ana_args), false);
      std::cout << "analyzed " << sum.snapshots.size() << " snapshot(s) into "
                << sum.output_directory << "\n";
    } else if (opt->parsed()) {
      const qsol::RunSummary sum = qsol::run_analyze(opt_snapshots, build_config(opt_args), true);
      std::cout << "optimized filters for " << sum.snapshots.size() << " snapshot(s) into "
                << sum.output_directory << "\n";
    } else if (orc->parsed()) {
      return qsol::run_oracle_validate(ocfg, std::cout);
    } else if (cls->parsed()) {
      const qsol::ClassicalResult res = qsol::run_classical(build_config(cls_args));
      std::cout << "final recurrence L-inf deviation: " << qsol::fmt_g17(res.recurrence_linf)
                << "\n";
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const qsol::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qsol::NumericalAbort& e) {
    std::cerr << "numerical abort at t = " << e.t_fail << " t_d: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
