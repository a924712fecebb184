#include "qsol/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qsol/errors.hpp"
#include "qsol/text_format.hpp"

namespace qsol {

using nlohmann::json;

void RunConfig::validate() const {
  if (grid.M < 2) throw ConfigError("grid.M must be >= 2");
  if (!(grid.L > 0.0)) throw ConfigError("grid.L must be positive");
  if (soliton.order < 1) throw ConfigError("soliton.order must be >= 1");
  if (!(soliton.n1 > 0.0)) throw ConfigError("soliton.n1 must be positive");
  if (physics.omega2_sign == 0.0) throw ConfigError("physics.omega2_sign must be nonzero");
  if (physics.gamma_td < 0.0) throw ConfigError("physics.gamma_td must be >= 0");
  if (!(run.t_end_td >= 0.0)) throw ConfigError("run.t_end_td must be >= 0");
  if (run.dt_td < 0.0) throw ConfigError("run.dt_td must be >= 0");
  if (!(filters.dx_width > 0.0) || !(filters.domega_width > 0.0))
    throw ConfigError("filter widths must be positive");
  if (optimize.min_width < 1) throw ConfigError("optimize.min_width must be >= 1");
  if (output.directory.empty()) throw ConfigError("output.directory must not be empty");
  for (const auto& f : output.formats)
    if (f != "csv" && f != "eta-maps" && f != "snapshots")
      throw ConfigError("unknown output format: " + f);
  double prev = 0.0;
  for (double t : run.snapshot_times_td) {
    if (!std::isfinite(t) || t < 0.0 || t > run.t_end_td + 1e-12)
      throw ConfigError("snapshot times must lie within [0, t_end]");
    if (t < prev) throw ConfigError("snapshot times must be sorted");
    prev = t;
  }
}

std::vector<double> RunConfig::snapshot_times() const {
  if (!run.snapshot_times_td.empty()) return run.snapshot_times_td;
  std::vector<double> times;
  const int points = 41;
  for (int i = 0; i < points; ++i) times.push_back(run.t_end_td * i / (points - 1));
  return times;
}

namespace {

json to_json(const RunConfig& c) {
  json j;
  j["grid"]["M"] = c.grid.M;
  j["grid"]["L"] = c.grid.L;
  j["soliton"]["order"] = c.soliton.order;
  j["soliton"]["n1"] = c.soliton.n1;
  j["physics"]["omega2_sign"] = c.physics.omega2_sign;
  j["physics"]["gamma_td"] = c.physics.gamma_td;
  j["physics"]["linear"] = c.physics.linear;
  j["run"]["t_end_td"] = c.run.t_end_td;
  j["run"]["dt_td"] = c.run.dt_td;
  j["run"]["snapshot_times_td"] = c.run.snapshot_times_td;
  j["filters"]["dx_width"] = c.filters.dx_width;
  j["filters"]["domega_width"] = c.filters.domega_width;
  j["optimize"]["enable"] = c.optimize.enable;
  j["optimize"]["min_width"] = c.optimize.min_width;
  j["output"]["directory"] = c.output.directory;
  j["output"]["formats"] = c.output.formats;
  return j;
}

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

std::string RunConfig::canonical_json() const { return to_json(*this).dump(); }

std::string RunConfig::config_hash() const { return hex64(fnv1a64(canonical_json())); }

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    if (j.contains("grid")) {
      maybe_get(j["grid"], "M", c.grid.M);
      maybe_get(j["grid"], "L", c.grid.L);
    }
    if (j.contains("soliton")) {
      maybe_get(j["soliton"], "order", c.soliton.order);
      maybe_get(j["soliton"], "n1", c.soliton.n1);
    }
    if (j.contains("physics")) {
      maybe_get(j["physics"], "omega2_sign", c.physics.omega2_sign);
      maybe_get(j["physics"], "gamma_td", c.physics.gamma_td);
      maybe_get(j["physics"], "linear", c.physics.linear);
    }
    if (j.contains("run")) {
      maybe_get(j["run"], "t_end_td", c.run.t_end_td);
      maybe_get(j["run"], "dt_td", c.run.dt_td);
      maybe_get(j["run"], "snapshot_times_td", c.run.snapshot_times_td);
    }
    if (j.contains("filters")) {
      maybe_get(j["filters"], "dx_width", c.filters.dx_width);
      maybe_get(j["filters"], "domega_width", c.filters.domega_width);
    }
    if (j.contains("optimize")) {
      maybe_get(j["optimize"], "enable", c.optimize.enable);
      maybe_get(j["optimize"], "min_width", c.optimize.min_width);
    }
    if (j.contains("output")) {
      maybe_get(j["output"], "directory", c.output.directory);
      maybe_get(j["output"], "formats", c.output.formats);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field type: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json_text(ss.str());
}

}  // namespace qsol
