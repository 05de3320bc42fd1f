#pragma once

/**
 * \file config.hpp
 * \brief JSON run configuration for the command-line workflows.
 *
 * Keys carry their unit as a suffix (r_i_mm, alpha_deg, c1_kpa,
 * eta_matrix_kpa_s, dt_s). Unknown keys are rejected so that typos surface
 * as errors instead of silently falling back to defaults. Every error names
 * the offending field path.
 */

#include <prestress/constitutive.hpp>
#include <prestress/driver.hpp>
#include <prestress/energy_scan.hpp>
#include <prestress/errors.hpp>
#include <prestress/tube.hpp>

#include <json.hpp>

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prestress {

/// Invalid or incomplete configuration; the message starts with the field path.
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : InvalidInput(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class Workflow { InverseSf, LoadFree, EnergyScan, PointTest };

inline std::string_view workflow_name(Workflow w) noexcept {
  switch (w) {
    case Workflow::InverseSf: return "inverse-sf";
    case Workflow::LoadFree: return "load-free";
    case Workflow::EnergyScan: return "energy-scan";
    case Workflow::PointTest: return "point-test";
  }
  return "";
}

inline Workflow parse_workflow(std::string_view s) {
  for (Workflow w : {Workflow::InverseSf, Workflow::LoadFree, Workflow::EnergyScan, Workflow::PointTest})
    if (workflow_name(w) == s) return w;
  throw InvalidInput("unknown workflow '" + std::string(s) + "'");
}

struct LayerConfig {
  std::string name;
  LayerMaterial material;
  bool has_viscous = false;
  std::optional<SectorGeometry> sector;
};

struct TubeConfig {
  TubeGeometry geometry;
  std::optional<double> alpha;  ///< rad
};

struct SolverConfig {
  double tol = 1e-10;
  int max_iter = 50;
};

struct PointConfig {
  std::size_t layer = 0;
  LoadProgram program;
  std::optional<Tensor2> f0;          ///< explicit F0
  std::optional<double> f0_at_r;      ///< mm, F0 of the opened layer at this load-free radius
};

struct RunConfig {
  std::optional<Workflow> workflow;
  std::optional<TubeConfig> tube;
  std::vector<LayerConfig> layers;
  SolverConfig solver;
  ScanGrid scan;
  std::optional<PointConfig> point;
  int profile_samples = 21;
};

namespace detail {

using json = nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(join_path(path, key), "unknown field");
  }
}

inline const json& object_at(const json& parent, const std::string& path, const std::string& key) {
  const std::string p = join_path(path, key);
  if (!parent.contains(key)) throw ConfigError(p, "missing required field");
  const json& v = parent.at(key);
  if (!v.is_object()) throw ConfigError(p, "expected an object");
  return v;
}

inline double number_at(const json& parent, const std::string& path, const std::string& key) {
  const std::string p = join_path(path, key);
  if (!parent.contains(key)) throw ConfigError(p, "missing required field");
  const json& v = parent.at(key);
  if (!v.is_number()) throw ConfigError(p, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(p, "expected a finite number");
  return x;
}

inline std::optional<double> optional_number(const json& parent, const std::string& path, const std::string& key) {
  if (!parent.contains(key)) return std::nullopt;
  return number_at(parent, path, key);
}

inline double positive(double x, const std::string& path) {
  if (!(x > 0.0)) throw ConfigError(path, "must be positive");
  return x;
}

inline Tensor2 tensor_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(path, "expected a 3x3 array of numbers");
  Tensor2 t;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_array() || v[i].size() != 3) throw ConfigError(path, "expected a 3x3 array of numbers");
    for (std::size_t j = 0; j < 3; ++j) {
      if (!v[i][j].is_number()) throw ConfigError(path, "expected a 3x3 array of numbers");
      t(i, j) = v[i][j].get<double>();
    }
  }
  return t;
}

inline SectorGeometry parse_sector(const json& j, const std::string& path) {
  reject_unknown(j, path, {"r_i_mm", "r_o_mm", "l_mm", "alpha_deg"});
  SectorGeometry s;
  s.Ri = positive(number_at(j, path, "r_i_mm"), join_path(path, "r_i_mm"));
  s.Ro = number_at(j, path, "r_o_mm");
  if (!(s.Ro > s.Ri)) throw ConfigError(join_path(path, "r_o_mm"), "must exceed r_i_mm");
  s.L = positive(number_at(j, path, "l_mm"), join_path(path, "l_mm"));
  const double a = number_at(j, path, "alpha_deg");
  if (!(a >= 0.0 && a < 360.0)) throw ConfigError(join_path(path, "alpha_deg"), "must lie in [0, 360)");
  s.alpha = deg_to_rad(a);
  return s;
}

inline LayerConfig parse_layer(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  reject_unknown(j, path,
                 {"name", "c1_kpa", "c2_kpa", "k1_kpa", "k2", "beta_deg", "tension_only_fibres", "mu_matrix_kpa",
                  "eta_matrix_kpa_s", "k1_visc_kpa", "k2_visc", "eta_fibre_kpa_s", "sector"});
  LayerConfig lc;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ConfigError(join_path(path, "name"), "expected a string");
    lc.name = j.at("name").get<std::string>();
  }
  EquilibriumMaterial& eq = lc.material.equilibrium;
  eq.matrix.c1 = number_at(j, path, "c1_kpa");
  eq.matrix.c2 = number_at(j, path, "c2_kpa");
  eq.k1 = number_at(j, path, "k1_kpa");
  eq.k2 = number_at(j, path, "k2");
  eq.beta = deg_to_rad(number_at(j, path, "beta_deg"));
  if (j.contains("tension_only_fibres")) {
    if (!j.at("tension_only_fibres").is_boolean())
      throw ConfigError(join_path(path, "tension_only_fibres"), "expected a boolean");
    eq.tension_only_fibres = j.at("tension_only_fibres").get<bool>();
  }
  try {
    eq.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(path, e.what());
  }

  const auto mu = optional_number(j, path, "mu_matrix_kpa");
  const auto eta = optional_number(j, path, "eta_matrix_kpa_s");
  const auto k1v = optional_number(j, path, "k1_visc_kpa");
  const auto k2v = optional_number(j, path, "k2_visc");
  const auto etaf = optional_number(j, path, "eta_fibre_kpa_s");
  lc.has_viscous = mu && eta && k1v && k2v && etaf;
  if (!lc.has_viscous && (mu || eta || k1v || k2v || etaf)) {
    for (const char* key : {"mu_matrix_kpa", "eta_matrix_kpa_s", "k1_visc_kpa", "k2_visc", "eta_fibre_kpa_s"})
      if (!j.contains(key)) throw ConfigError(join_path(path, key), "missing (viscous parameters come as a set)");
  }
  if (lc.has_viscous) {
    lc.material.iso = {*mu, *eta};
    lc.material.k1v = *k1v;
    lc.material.k2v = *k2v;
    lc.material.eta_f = *etaf;
    try {
      lc.material.validate(true);
    } catch (const InvalidInput& e) {
      throw ConfigError(path, e.what());
    }
  }
  if (j.contains("sector")) lc.sector = parse_sector(object_at(j, path, "sector"), join_path(path, "sector"));
  return lc;
}

inline TubeConfig parse_tube(const json& j, const std::string& path) {
  reject_unknown(j, path, {"r_i_mm", "r_interface_mm", "r_o_mm", "l_mm", "alpha_deg"});
  TubeConfig t;
  t.geometry.ri = positive(number_at(j, path, "r_i_mm"), join_path(path, "r_i_mm"));
  t.geometry.r_interface = optional_number(j, path, "r_interface_mm");
  t.geometry.ro = number_at(j, path, "r_o_mm");
  t.geometry.l = positive(number_at(j, path, "l_mm"), join_path(path, "l_mm"));
  if (!(t.geometry.ro > t.geometry.ri)) throw ConfigError(join_path(path, "r_o_mm"), "must exceed r_i_mm");
  if (t.geometry.r_interface && !(*t.geometry.r_interface > t.geometry.ri && *t.geometry.r_interface < t.geometry.ro))
    throw ConfigError(join_path(path, "r_interface_mm"), "must lie strictly between r_i_mm and r_o_mm");
  if (const auto a = optional_number(j, path, "alpha_deg")) {
    if (!(*a >= 0.0 && *a < 360.0)) throw ConfigError(join_path(path, "alpha_deg"), "must lie in [0, 360)");
    t.alpha = deg_to_rad(*a);
  }
  return t;
}

inline PointConfig parse_point(const json& j, const std::string& path) {
  reject_unknown(j, path, {"layer", "dt_s", "keyframes", "f0", "f0_at_r_mm"});
  PointConfig pc;
  if (j.contains("layer")) {
    const json& v = j.at("layer");
    if (!v.is_number_integer() || v.get<long>() < 0)
      throw ConfigError(join_path(path, "layer"), "expected a non-negative integer");
    pc.layer = v.get<std::size_t>();
  }
  pc.program.dt = positive(number_at(j, path, "dt_s"), join_path(path, "dt_s"));
  const std::string kp = join_path(path, "keyframes");
  if (!j.contains("keyframes")) throw ConfigError(kp, "missing required field");
  const json& kf = j.at("keyframes");
  if (!kf.is_array() || kf.empty()) throw ConfigError(kp, "expected a non-empty array");
  for (std::size_t i = 0; i < kf.size(); ++i) {
    const std::string ip = kp + "[" + std::to_string(i) + "]";
    if (!kf[i].is_object()) throw ConfigError(ip, "expected an object");
    reject_unknown(kf[i], ip, {"t_s", "F"});
    if (!kf[i].contains("F")) throw ConfigError(join_path(ip, "F"), "missing required field");
    pc.program.keyframes.push_back({number_at(kf[i], ip, "t_s"), tensor_at(kf[i].at("F"), join_path(ip, "F"))});
  }
  try {
    pc.program.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(kp, e.what());
  }
  if (j.contains("f0") && j.contains("f0_at_r_mm"))
    throw ConfigError(path, "give at most one of f0 and f0_at_r_mm");
  if (j.contains("f0")) pc.f0 = tensor_at(j.at("f0"), join_path(path, "f0"));
  pc.f0_at_r = optional_number(j, path, "f0_at_r_mm");
  return pc;
}

}  // namespace detail

/// Parses a configuration document. Workflow-specific completeness is
/// checked separately by require_blocks.
inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw prestress::ConfigError("<root>", "expected a JSON object");
  detail::reject_unknown(j, "", {"workflow", "tube", "layers", "solver", "scan", "point", "profile_samples"});
  RunConfig rc;
  if (j.contains("workflow")) {
    if (!j.at("workflow").is_string()) throw prestress::ConfigError("workflow", "expected a string");
    try {
      rc.workflow = parse_workflow(j.at("workflow").get<std::string>());
    } catch (const InvalidInput& e) {
      throw prestress::ConfigError("workflow", e.what());
    }
  }
  if (j.contains("tube")) rc.tube = detail::parse_tube(detail::object_at(j, "", "tube"), "tube");
  if (j.contains("layers")) {
    const auto& ls = j.at("layers");
    if (!ls.is_array()) throw prestress::ConfigError("layers", "expected an array");
    for (std::size_t i = 0; i < ls.size(); ++i)
      rc.layers.push_back(detail::parse_layer(ls[i], "layers[" + std::to_string(i) + "]"));
  }
  if (j.contains("solver")) {
    const auto& s = detail::object_at(j, "", "solver");
    detail::reject_unknown(s, "solver", {"tol", "max_iter"});
    if (const auto t = detail::optional_number(s, "solver", "tol")) rc.solver.tol = detail::positive(*t, "solver.tol");
    if (s.contains("max_iter")) {
      if (!s.at("max_iter").is_number_integer() || s.at("max_iter").get<long>() < 1)
        throw prestress::ConfigError("solver.max_iter", "expected a positive integer");
      rc.solver.max_iter = s.at("max_iter").get<int>();
    }
  }
  if (j.contains("scan")) {
    const auto& s = detail::object_at(j, "", "scan");
    detail::reject_unknown(s, "scan", {"grid_start_deg", "grid_end_deg", "grid_step_deg"});
    if (const auto v = detail::optional_number(s, "scan", "grid_start_deg")) rc.scan.start_deg = *v;
    if (const auto v = detail::optional_number(s, "scan", "grid_end_deg")) rc.scan.end_deg = *v;
    if (const auto v = detail::optional_number(s, "scan", "grid_step_deg")) rc.scan.step_deg = *v;
  }
  if (j.contains("point")) rc.point = detail::parse_point(detail::object_at(j, "", "point"), "point");
  if (j.contains("profile_samples")) {
    const auto& v = j.at("profile_samples");
    if (!v.is_number_integer() || v.get<long>() < 2)
      throw prestress::ConfigError("profile_samples", "expected an integer >= 2");
    rc.profile_samples = v.get<int>();
  }
  return rc;
}

/// Parses JSON text; syntax errors report line and column.
inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  return parse_config(j);
}

/// Checks that the blocks a workflow needs are present and consistent.
inline void require_blocks(const RunConfig& rc, Workflow w) {
  if (rc.layers.empty()) throw ConfigError("layers", "missing required field");
  switch (w) {
    case Workflow::InverseSf: {
      if (!rc.tube) throw ConfigError("tube", "missing required field");
      if (!rc.tube->alpha) throw ConfigError("tube.alpha_deg", "missing required field");
      if (static_cast<int>(rc.layers.size()) != rc.tube->geometry.layer_count())
        throw ConfigError("layers", "expected " + std::to_string(rc.tube->geometry.layer_count()) +
                                        " layer(s) to match the tube radii");
      break;
    }
    case Workflow::LoadFree:
    case Workflow::EnergyScan: {
      if (w == Workflow::LoadFree && rc.layers.size() > 2)
        throw ConfigError("layers", "load-free takes one or two layers");
      for (std::size_t i = 0; i < rc.layers.size(); ++i)
        if (!rc.layers[i].sector)
          throw ConfigError("layers[" + std::to_string(i) + "].sector", "missing required field");
      break;
    }
    case Workflow::PointTest: {
      if (!rc.point) throw ConfigError("point", "missing required field");
      if (rc.point->layer >= rc.layers.size()) throw ConfigError("point.layer", "no such layer");
      const std::string lp = "layers[" + std::to_string(rc.point->layer) + "]";
      if (!rc.layers[rc.point->layer].has_viscous)
        throw ConfigError(lp, "point-test needs mu_matrix_kpa, eta_matrix_kpa_s, k1_visc_kpa, k2_visc and "
                              "eta_fibre_kpa_s");
      if (rc.point->f0_at_r) {
        if (!rc.tube) throw ConfigError("tube", "required by point.f0_at_r_mm");
        if (!rc.layers[rc.point->layer].sector) throw ConfigError(lp + ".sector", "required by point.f0_at_r_mm");
      }
      break;
    }
  }
}

}  // namespace prestress
