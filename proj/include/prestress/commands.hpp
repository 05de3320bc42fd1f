#pragma once

/**
 * \file commands.hpp
 * \brief Workflow orchestration behind the prestress_tube command line.
 *
 * Each workflow reads a RunConfig, writes one CSV file and returns a JSON
 * summary {workflow, converged, residuals, key_results}. Exit codes: 0 on
 * success, 1 for invalid input, 2 for numerical failure.
 */

#include <prestress/config.hpp>
#include <prestress/driver.hpp>
#include <prestress/energy_scan.hpp>
#include <prestress/errors.hpp>
#include <prestress/tube.hpp>

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace prestress {

inline constexpr const char* tool_version = "1.0.0";

enum ExitCode : int { exit_ok = 0, exit_invalid_input = 1, exit_numerical = 2 };

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Fixed-format CSV: `%.12g` numbers, a provenance comment and a header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw InvalidInput("CSV row width does not match the header");
    rows_.push_back(row);
  }
  std::size_t rows() const noexcept { return rows_.size(); }

  std::string render(std::uint64_t config_hash) const {
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, config_hash);
    out += std::string("# prestress_tube ") + tool_version + " config_hash=" + buf + "\n";
    for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
    out += "\n";
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", r[i]);
        if (i) out += ",";
        out += buf;
      }
      out += "\n";
    }
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// Command-line overrides; unset fields keep the config values.
struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<double> grid_start_deg;
  std::optional<double> grid_end_deg;
  std::optional<double> grid_step_deg;
  std::optional<double> dt_s;
  std::optional<double> tol;
  std::optional<int> threads;
};

struct CommandResult {
  int exit_code = exit_ok;
  nlohmann::json summary;
};

/// Scan parallelism: PRESTRESS_TUBE_THREADS if set, otherwise all cores.
inline int scan_threads() {
  const int cores = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("PRESTRESS_TUBE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw InvalidInput("PRESTRESS_TUBE_THREADS must be a positive integer");
    return static_cast<int>(std::min<long>(v, 1024));
  }
  return cores;
}

namespace detail {

inline CsvTable profile_table(const std::vector<StressSample>& prof) {
  CsvTable t({"r_mm", "layer", "T_rr_kpa", "T_tt_kpa", "T_zz_kpa"});
  for (const auto& s : prof) t.add_row({s.r, static_cast<double>(s.layer), s.T_rr, s.T_tt, s.T_zz});
  return t;
}

inline std::vector<LayerMaterial> materials_of(const RunConfig& rc) {
  std::vector<LayerMaterial> m;
  for (const auto& l : rc.layers) m.push_back(l.material);
  return m;
}

inline std::vector<MaterialLayer> layers_of(const RunConfig& rc) {
  std::vector<MaterialLayer> m;
  for (const auto& l : rc.layers) m.push_back({*l.sector, l.material});
  return m;
}

inline TubeSolverOptions tube_options(const RunConfig& rc, const CommandOptions& o) {
  TubeSolverOptions t;
  t.newton.tol = o.tol.value_or(rc.solver.tol);
  t.newton.max_iter = rc.solver.max_iter;
  return t;
}

inline void reject_overrides(const CommandOptions& o, Workflow w) {
  const bool grid = o.grid_start_deg || o.grid_end_deg || o.grid_step_deg;
  if (grid && w != Workflow::EnergyScan) throw InvalidInput("--grid-* options apply to energy-scan only");
  if (o.dt_s && w != Workflow::PointTest) throw InvalidInput("--dt applies to point-test only");
  if (o.tol && w == Workflow::PointTest) throw InvalidInput("--tol does not apply to point-test");
  if (o.tol && !(*o.tol > 0.0)) throw InvalidInput("--tol must be positive");
}

inline nlohmann::json run_inverse_sf(const RunConfig& rc, const CommandOptions& o, CsvTable& csv) {
  const TubeConfig& tc = *rc.tube;
  const auto mats = materials_of(rc);
  const InverseSolution sol = solve_inverse_sf(tc.geometry, *tc.alpha, mats, tube_options(rc, o));

  std::vector<MaterialLayer> layers;
  for (std::size_t j = 0; j < mats.size(); ++j) layers.push_back({sol.sectors[j], mats[j]});
  csv = profile_table(wall_stress_profile(tube_state(layers, tc.geometry), rc.profile_samples));

  nlohmann::json sectors = nlohmann::json::array();
  for (const auto& s : sol.sectors)
    sectors.push_back({{"R_i_mm", s.Ri}, {"R_o_mm", s.Ro}, {"L_mm", s.L}, {"alpha_deg", rad_to_deg(s.alpha)}});
  nlohmann::json key{{"R_i_mm", sol.sectors.front().Ri},
                     {"R_o_mm", sol.sectors.back().Ro},
                     {"L_mm", sol.sectors.front().L},
                     {"sectors", sectors}};
  if (sol.sectors.size() == 2) key["R_interface_mm"] = sol.sectors.front().Ro;
  return {{"residuals", {{"net_pressure_kpa", sol.net_pressure}, {"axial_force_un", sol.axial_force},
                         {"iterations", sol.iterations}}},
          {"key_results", key}};
}

inline nlohmann::json run_load_free(const RunConfig& rc, const CommandOptions& o, CsvTable& csv) {
  const auto layers = layers_of(rc);
  const LoadFreeSolution sol = solve_load_free(layers, tube_options(rc, o));
  csv = profile_table(wall_stress_profile(tube_state(layers, sol.tube), rc.profile_samples));
  nlohmann::json key{{"r_i_mm", sol.tube.ri}, {"r_o_mm", sol.tube.ro}, {"l_mm", sol.tube.l}};
  if (sol.tube.r_interface) key["r_interface_mm"] = *sol.tube.r_interface;
  return {{"residuals", {{"net_pressure_kpa", sol.net_pressure}, {"axial_force_un", sol.axial_force},
                         {"iterations", sol.iterations}}},
          {"key_results", key}};
}

inline nlohmann::json run_energy_scan(const RunConfig& rc, const CommandOptions& o, CsvTable& csv) {
  const auto layers = layers_of(rc);
  ScanGrid grid = rc.scan;
  if (o.grid_start_deg) grid.start_deg = *o.grid_start_deg;
  if (o.grid_end_deg) grid.end_deg = *o.grid_end_deg;
  if (o.grid_step_deg) grid.step_deg = *o.grid_step_deg;
  EnergyScanOptions opt;
  if (o.tol) opt.gradient_tol = *o.tol;
  opt.threads = o.threads.value_or(scan_threads());

  const EnergyCurve curve = find_opening_angle(layers, grid, opt);
  csv = CsvTable({"alpha_deg", "E_microJ"});
  for (const auto& s : curve.samples) csv.add_row({s.alpha_deg, s.energy});

  const TubeState opened = opened_state(layers, curve.at_argmin.candidate);
  double max_tt = 0.0;
  for (const auto& s : wall_stress_profile(opened, rc.profile_samples)) max_tt = std::max(max_tt, std::abs(s.T_tt));
  double min_alpha = two_pi;
  for (const auto& l : layers) min_alpha = std::min(min_alpha, l.sector.alpha);

  return {{"residuals", {{"gradient_norm_microJ_per_mm", curve.at_argmin.gradient_norm},
                         {"net_pressure_kpa", net_pressure(opened)},
                         {"axial_force_un", reduced_axial_force(opened)}}},
          {"key_results", {{"argmin_deg", curve.argmin_deg},
                           {"E_min_microJ", curve.energy_min},
                           {"rho_interface_mm", curve.at_argmin.candidate.rho_interface},
                           {"l_open_mm", curve.at_argmin.candidate.l_open},
                           {"max_abs_T_tt_kpa", max_tt},
                           {"below_every_layer_angle", curve.argmin_deg < rad_to_deg(min_alpha)},
                           {"samples", curve.samples.size()}}}};
}

/// F0 of a closed tube at load-free radius r, from the layer's sector and the tube geometry.
inline PreStressField point_f0(const RunConfig& rc) {
  const PointConfig& pc = *rc.point;
  if (pc.f0) return PreStressField(*pc.f0);
  if (!pc.f0_at_r) return PreStressField();
  const TubeGeometry& g = rc.tube->geometry;
  const std::vector<double> rb = g.boundaries();
  if (pc.layer + 1 >= rb.size()) throw ConfigError("point.layer", "tube has no such layer");
  const double r = *pc.f0_at_r;
  if (!(r >= rb[pc.layer] && r <= rb[pc.layer + 1]))
    throw ConfigError("point.f0_at_r_mm", "radius lies outside the selected layer");
  const SectorGeometry& s = *rc.layers[pc.layer].sector;
  const OpeningMap map{s.closing_factor(), g.l / s.L, rb[pc.layer], s.Ri};
  return PreStressField(F0_at(r, map));
}

inline nlohmann::json run_point_test(const RunConfig& rc, const CommandOptions& o, CsvTable& csv) {
  LoadProgram program = rc.point->program;
  if (o.dt_s) program.dt = *o.dt_s;
  const PreStressField f0 = point_f0(rc);
  const PointTrace trace = run_point(program, rc.layers[rc.point->layer].material, f0);

  csv = CsvTable({"t_s", "T_rr_kpa", "T_tt_kpa", "T_zz_kpa", "T_rt_kpa", "T_rz_kpa", "T_tz_kpa", "det_Ci",
                  "lambda_i_1", "lambda_i_2", "overstress_norm_kpa"});
  double peak = 0.0, drift = 0.0;
  for (const auto& r : trace) {
    const Tensor2& s = r.cauchy;
    csv.add_row({r.t, s(0, 0), s(1, 1), s(2, 2), s(0, 1), s(0, 2), s(1, 2), r.det_ci, r.lambda_i[0], r.lambda_i[1],
                 r.overstress_norm});
    peak = std::max(peak, r.overstress_norm);
    drift = std::max(drift, std::abs(r.det_ci - 1.0));
  }
  return {{"residuals", {{"max_det_ci_drift", drift}}},
          {"key_results", {{"steps", trace.size() - 1},
                           {"peak_overstress_kpa", peak},
                           {"final_overstress_kpa", trace.back().overstress_norm},
                           {"final_T_tt_kpa", trace.back().cauchy(1, 1)}}}};
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InvalidInput("cannot read config file '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Hash of the config bytes plus the effective overrides.
inline std::uint64_t run_hash(const std::string& text, Workflow w, const CommandOptions& o) {
  std::string key = text;
  key += "\nworkflow=" + std::string(workflow_name(w));
  auto add = [&](const char* name, const std::optional<double>& v) {
    if (!v) return;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    key += std::string("\n") + name + "=" + buf;
  };
  add("grid_start", o.grid_start_deg);
  add("grid_end", o.grid_end_deg);
  add("grid_step", o.grid_step_deg);
  add("dt", o.dt_s);
  add("tol", o.tol);
  return fnv1a64(key);
}

}  // namespace detail

/// Runs one workflow end to end. Never throws for input or numerical
/// problems; they are reported through the exit code and summary.
inline CommandResult run_workflow(Workflow w, const CommandOptions& o) {
  CommandResult res;
  res.summary = {{"workflow", workflow_name(w)}, {"converged", false}, {"residuals", nlohmann::json::object()},
                 {"key_results", nlohmann::json::object()}};
  try {
    detail::reject_overrides(o, w);
    const std::string text = detail::read_file(o.config);
    const RunConfig rc = parse_config_text(text);
    if (rc.workflow && *rc.workflow != w)
      throw ConfigError("workflow", "config is for '" + std::string(workflow_name(*rc.workflow)) + "'");
    require_blocks(rc, w);

    CsvTable csv({});
    nlohmann::json part;
    switch (w) {
      case Workflow::InverseSf: part = detail::run_inverse_sf(rc, o, csv); break;
      case Workflow::LoadFree: part = detail::run_load_free(rc, o, csv); break;
      case Workflow::EnergyScan: part = detail::run_energy_scan(rc, o, csv); break;
      case Workflow::PointTest: part = detail::run_point_test(rc, o, csv); break;
    }
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw InvalidInput("cannot open output file '" + o.out.string() + "'");
    out << csv.render(detail::run_hash(text, w, o));
    if (!out.flush()) throw InvalidInput("failed writing output file '" + o.out.string() + "'");

    res.summary["converged"] = true;
    res.summary["residuals"] = part["residuals"];
    res.summary["key_results"] = part["key_results"];
    res.summary["output"] = o.out.string();
    res.exit_code = exit_ok;
  } catch (const InvalidInput& e) {
    res.summary["error"] = {{"kind", "invalid_input"}, {"message", e.what()}};
    res.exit_code = exit_invalid_input;
  } catch (const nlohmann::json::exception& e) {
    res.summary["error"] = {{"kind", "invalid_input"}, {"message", e.what()}};
    res.exit_code = exit_invalid_input;
  } catch (const NoConvergence& e) {
    res.summary["error"] = {{"kind", "no_convergence"}, {"message", e.what()}};
    res.summary["residuals"] = {{"last_iterate", e.last_iterate()}, {"residual", e.residual()},
                                {"iterations", e.iterations()}};
    res.exit_code = exit_numerical;
  } catch (const NumericalError& e) {
    res.summary["error"] = {{"kind", "numerical"}, {"message", e.what()}};
    res.exit_code = exit_numerical;
  }
  return res;
}

}  // namespace prestress
