#pragma once

/**
 * \file tube.hpp
 * \brief Thick-walled layered tubes built from open stress-free sectors.
 *
 * A layer's sector (R_i < R < R_o, 0 < Θ < 2π - α, 0 < Z < L) is mapped onto
 * an annular segment by
 *
 *   r² = r_i² + (R² - R_i²) / (k c),   θ = k Θ,   z = c Z,
 *
 * which is isochoric for every choice of (k, c, r_i). The closed tube uses
 * k = 2π / (2π - α) and c = l / L. Within this map the deformation gradient
 * from the sf-configuration is diag(R/(k c r), k r/R, c) in {e_r, e_θ, e_z},
 * and F0 is its inverse.
 *
 * Radial equilibrium with traction-free or pressure-loaded faces reduces to
 * two integrals of the pressure-free stress: the net pressure
 * ∫ (T_θθ - T_rr)/r dr and the reduced axial force π ∫ (2T_zz - T_θθ - T_rr) r dr.
 *
 * Units: mm, kPa, kPa·mm² (µN).
 */

#include <prestress/constitutive.hpp>
#include <prestress/errors.hpp>
#include <prestress/quadrature.hpp>
#include <prestress/solvers.hpp>
#include <prestress/tensor.hpp>
#include <prestress/viscoelastic.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prestress {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Open stress-free sector. Angles are radians.
struct SectorGeometry {
  double Ri = 0.0;
  double Ro = 0.0;
  double L = 0.0;
  double alpha = 0.0;

  void validate() const {
    if (!(Ri > 0.0 && Ro > Ri)) throw InvalidInput("sector needs 0 < R_i < R_o");
    if (!(L > 0.0)) throw InvalidInput("sector needs L > 0");
    if (!(alpha >= 0.0 && alpha < two_pi)) throw InvalidInput("opening angle must lie in [0, 360) degrees");
  }
  /// Hoop factor k = 2π/(2π - α) that closes the sector.
  double closing_factor() const noexcept { return two_pi / (two_pi - alpha); }
  double volume() const noexcept { return 0.5 * (two_pi - alpha) * L * (Ro * Ro - Ri * Ri); }
};

/// Load-free tube; r_interface is set for two-layer composites.
struct TubeGeometry {
  double ri = 0.0;
  std::optional<double> r_interface;
  double ro = 0.0;
  double l = 0.0;

  void validate() const {
    if (!(ri > 0.0 && ro > ri)) throw InvalidInput("tube needs 0 < r_i < r_o");
    if (r_interface && !(*r_interface > ri && *r_interface < ro))
      throw InvalidInput("tube needs r_i < r_interface < r_o");
    if (!(l > 0.0)) throw InvalidInput("tube needs l > 0");
  }
  int layer_count() const noexcept { return r_interface ? 2 : 1; }
  /// Radii bounding each layer, inner to outer.
  std::vector<double> boundaries() const {
    if (r_interface) return {ri, *r_interface, ro};
    return {ri, ro};
  }
};

/// Constitutive data of one layer.
struct LayerMaterial {
  EquilibriumMaterial equilibrium;
  IsoMaxwellParams iso;
  double k1v = 0.0;    ///< kPa
  double k2v = 0.0;
  double eta_f = 0.0;  ///< kPa·s

  std::array<FibreMaxwellParams, 2> fibre_maxwell() const {
    const double b = equilibrium.beta;
    return {FibreMaxwellParams{k1v, k2v, eta_f, helical_fibre(b, +1)},
            FibreMaxwellParams{k1v, k2v, eta_f, helical_fibre(b, -1)}};
  }

  void validate(bool with_viscous = true) const {
    equilibrium.validate();
    if (with_viscous) {
      iso.validate();
      for (const auto& f : fibre_maxwell()) f.validate();
    }
  }
};

struct MaterialLayer {
  SectorGeometry sector;
  LayerMaterial material;
};

/// Map between one sector and its image. (ri, Ri) is a pair of matching radii.
struct OpeningMap {
  double k = 1.0;   ///< hoop factor θ = k Θ
  double c = 1.0;   ///< axial ratio l/L
  double ri = 1.0;  ///< mm, image radius of R = Ri
  double Ri = 1.0;  ///< mm

  double R_of_r(double r) const {
    const double rad = Ri * Ri + k * c * (r * r - ri * ri);
    if (!(rad > 0.0)) throw DomainError("opening map: negative radicand at r = " + format_sci(r));
    return std::sqrt(rad);
  }
  double r_of_R(double R) const {
    const double rad = (R * R - Ri * Ri) / (k * c) + ri * ri;
    if (!(rad > 0.0)) throw DomainError("opening map: negative radicand at R = " + format_sci(R));
    return std::sqrt(rad);
  }
};

/// Hoop stretch k r / R as a function of the load-free radius.
inline double f_lf(double r, const OpeningMap& m) { return m.k * r / m.R_of_r(r); }

/// Hoop stretch as a function of the sector radius.
inline double f_sf(double R, const OpeningMap& m) { return m.k * m.r_of_R(R) / R; }

/// diag(c f, 1/f, 1/c), carrying the lf-configuration to the sf-configuration.
inline Tensor2 F0_at(double r, const OpeningMap& m) {
  const double f = f_lf(r, m);
  return Tensor2::diag(m.c * f, 1.0 / f, 1.0 / m.c);
}

/// Deformation gradient from the sector at radius R onto its image.
inline Tensor2 sector_to_tube_F(double R, const OpeningMap& m) {
  const double r = m.r_of_R(R);
  return Tensor2::diag(R / (m.k * m.c * r), m.k * r / R, m.c);
}

/// Same map evaluated at the image radius r.
inline Tensor2 sector_to_tube_F_at_r(double r, const OpeningMap& m) {
  const double R = m.R_of_r(r);
  return Tensor2::diag(R / (m.k * m.c * r), m.k * r / R, m.c);
}

/// One layer of a candidate deformed state: the map and the image radii.
struct LayerKinematics {
  EquilibriumMaterial material;
  OpeningMap map;
  double r_inner = 0.0;
  double r_outer = 0.0;
};

using TubeState = std::vector<LayerKinematics>;

/// Builds the state in which every layer is mapped onto a common segment of
/// angular span 2π - alpha_target and length l. The outer radius of the
/// innermost layer is `r_anchor`; other radii follow from incompressibility.
inline TubeState layered_state(std::span<const MaterialLayer> layers, double alpha_target, double r_anchor,
                               double l) {
  if (layers.empty()) throw InvalidInput("at least one layer is required");
  if (!(l > 0.0) || !(r_anchor > 0.0)) throw DomainError("non-positive length or radius in candidate state");
  TubeState st;
  st.reserve(layers.size());
  double r_prev = 0.0;
  for (std::size_t j = 0; j < layers.size(); ++j) {
    const SectorGeometry& s = layers[j].sector;
    const double k = (two_pi - alpha_target) / (two_pi - s.alpha);
    const double c = l / s.L;
    const double area = (s.Ro * s.Ro - s.Ri * s.Ri) / (k * c);
    double r_in = 0.0, r_out = 0.0;
    if (j == 0) {
      r_out = r_anchor;
      const double rad = r_out * r_out - area;
      if (!(rad > 0.0)) throw DomainError("candidate state has a non-positive inner radius");
      r_in = std::sqrt(rad);
    } else {
      r_in = r_prev;
      r_out = std::sqrt(r_in * r_in + area);
    }
    st.push_back({layers[j].material.equilibrium, OpeningMap{k, c, r_in, s.Ri}, r_in, r_out});
    r_prev = r_out;
  }
  return st;
}

/// Pressure-free Cauchy stress at image radius r of one layer.
inline Tensor2 layer_extra_stress(const LayerKinematics& lk, double r) {
  return extra_cauchy_equilibrium(sector_to_tube_F_at_r(r, lk.map), lk.material);
}

/// p_inner - p_outer = Σ ∫ (T_θθ - T_rr)/r dr, in kPa. Layers are integrated
/// separately so the material jump at each interface is a panel boundary.
inline double net_pressure(const TubeState& st, const QuadratureOptions& q = {}) {
  double sum = 0.0;
  for (const auto& lk : st) {
    auto integrand = [&](double r) {
      const Tensor2 t = layer_extra_stress(lk, r);
      return (t(1, 1) - t(0, 0)) / r;
    };
    sum += integrate_checked(integrand, lk.r_inner, lk.r_outer, q).value;
  }
  return sum;
}

/// π Σ ∫ (2T_zz - T_θθ - T_rr) r dr, in kPa·mm² (µN).
inline double reduced_axial_force(const TubeState& st, const QuadratureOptions& q = {}) {
  double sum = 0.0;
  for (const auto& lk : st) {
    auto integrand = [&](double r) {
      const Tensor2 t = layer_extra_stress(lk, r);
      return (2.0 * t(2, 2) - t(1, 1) - t(0, 0)) * r;
    };
    sum += integrate_checked(integrand, lk.r_inner, lk.r_outer, q).value;
  }
  return std::numbers::pi * sum;
}

struct StressSample {
  double r = 0.0;  ///< mm
  int layer = 0;
  double T_rr = 0.0;  ///< kPa
  double T_tt = 0.0;
  double T_zz = 0.0;
};

/// Full Cauchy stress through the wall. T_rr follows from integrating radial
/// equilibrium outward from T_rr(r_i) = -inner_pressure.
inline std::vector<StressSample> wall_stress_profile(const TubeState& st, int samples_per_layer = 21,
                                                     double inner_pressure = 0.0) {
  if (samples_per_layer < 2) throw InvalidInput("need at least two samples per layer");
  const GaussLegendreRule& rule = gauss_legendre(32);
  std::vector<StressSample> out;
  double t_rr = -inner_pressure;
  for (std::size_t j = 0; j < st.size(); ++j) {
    const LayerKinematics& lk = st[j];
    double r_prev = lk.r_inner;
    for (int i = 0; i < samples_per_layer; ++i) {
      const double r = lk.r_inner + (lk.r_outer - lk.r_inner) * i / (samples_per_layer - 1);
      if (i > 0) {
        t_rr += rule.integrate(
            [&](double s) {
              const Tensor2 t = layer_extra_stress(lk, s);
              return (t(1, 1) - t(0, 0)) / s;
            },
            r_prev, r);
      }
      const Tensor2 t = layer_extra_stress(lk, r);
      out.push_back({r, static_cast<int>(j), t_rr, t_rr + t(1, 1) - t(0, 0), t_rr + t(2, 2) - t(0, 0)});
      r_prev = r;
    }
  }
  return out;
}

// --- solvers -------------------------------------------------------------------------

struct TubeSolverOptions {
  NewtonOptions newton{};
  QuadratureOptions quadrature{};
};

namespace detail {
inline double stress_scale(std::span<const LayerMaterial> mats) {
  double s = 0.0;
  for (const auto& m : mats) s = std::max(s, m.equilibrium.matrix.c1);
  if (s > 0.0) return s;
  for (const auto& m : mats) s = std::max(s, m.equilibrium.matrix.c2);
  return s;
}
}  // namespace detail

struct InverseSolution {
  std::vector<SectorGeometry> sectors;
  double net_pressure = 0.0;  ///< kPa
  double axial_force = 0.0;   ///< µN
  int iterations = 0;
  std::vector<double> history;
};

/// Sector layers sharing an opening angle and length whose closed image is the given tube.
inline std::vector<MaterialLayer> sectors_for_tube(const TubeGeometry& tube, double alpha, double Ri, double L,
                                                   std::span<const LayerMaterial> materials) {
  const double k = two_pi / (two_pi - alpha);
  const double c = tube.l / L;
  const std::vector<double> rb = tube.boundaries();
  std::vector<MaterialLayer> out;
  double R_in = Ri;
  for (std::size_t j = 0; j < materials.size(); ++j) {
    const double R_out = std::sqrt(R_in * R_in + k * c * (rb[j + 1] * rb[j + 1] - rb[j] * rb[j]));
    out.push_back({SectorGeometry{R_in, R_out, L, alpha}, materials[j]});
    R_in = R_out;
  }
  return out;
}

/// Stress-free sectors of a load-free tube with known opening angle. The
/// unknowns are R_i and L; every other sector radius follows from
/// incompressibility of each layer, L (2π - α)(R_o² - R_i²) = l 2π (r_o² - r_i²).
inline InverseSolution solve_inverse_sf(const TubeGeometry& tube, double alpha,
                                        std::span<const LayerMaterial> materials,
                                        const TubeSolverOptions& opt = {}) {
  tube.validate();
  if (static_cast<int>(materials.size()) != tube.layer_count())
    throw InvalidInput("number of materials must match the number of tube layers");
  if (!(alpha >= 0.0 && alpha < two_pi)) throw InvalidInput("opening angle must lie in [0, 360) degrees");
  for (const auto& m : materials) m.equilibrium.validate();

  const double len = tube.ri;
  const double sig = detail::stress_scale(materials);
  const double k = two_pi / (two_pi - alpha);

  auto state_for = [&](const VecN<2>& x) {
    const double Ri = x[0] * len;
    const double L = x[1] * tube.l;
    if (!(Ri > 0.0 && L > 0.0)) throw DomainError("non-positive sector candidate");
    const auto layers = sectors_for_tube(tube, alpha, Ri, L, materials);
    // closed tube: anchor at the outer radius of the innermost layer
    return layered_state(layers, 0.0, tube.boundaries()[1], tube.l);
  };
  auto residual = [&](const VecN<2>& x) -> VecN<2> {
    const TubeState st = state_for(x);
    return {net_pressure(st, opt.quadrature) / sig,
            reduced_axial_force(st, opt.quadrature) / (sig * len * len)};
  };

  const VecN<2> x0{k, 1.0};
  const NewtonReport<2> rep = newton_solve<2>(residual, x0, opt.newton);
  if (!rep.converged)
    throw NoConvergence("inverse stress-free problem did not converge",
                        {rep.x[0] * len, rep.x[1] * tube.l},
                        {rep.residual[0] * sig, rep.residual[1] * sig * len * len}, rep.iterations);

  InverseSolution sol;
  for (const auto& l : sectors_for_tube(tube, alpha, rep.x[0] * len, rep.x[1] * tube.l, materials))
    sol.sectors.push_back(l.sector);
  sol.net_pressure = rep.residual[0] * sig;
  sol.axial_force = rep.residual[1] * sig * len * len;
  sol.iterations = rep.iterations;
  sol.history = rep.history;
  return sol;
}

struct LoadFreeSolution {
  TubeGeometry tube;
  double net_pressure = 0.0;  ///< kPa
  double axial_force = 0.0;   ///< µN
  int iterations = 0;
  std::vector<double> history;
};

/// Closed load-free state of glued sectors. Unknowns are the outer radius of
/// the innermost layer (r_interface for two layers) and the common length l.
inline TubeState closed_state(std::span<const MaterialLayer> layers, double r_anchor, double l) {
  return layered_state(layers, 0.0, r_anchor, l);
}

inline TubeGeometry geometry_of(const TubeState& st, double l) {
  TubeGeometry g;
  g.ri = st.front().r_inner;
  g.ro = st.back().r_outer;
  if (st.size() == 2) g.r_interface = st.front().r_outer;
  g.l = l;
  return g;
}

inline LoadFreeSolution solve_load_free(std::span<const MaterialLayer> layers, const TubeSolverOptions& opt = {}) {
  if (layers.empty() || layers.size() > 2) throw InvalidInput("load-free solver takes one or two layers");
  for (const auto& l : layers) {
    l.sector.validate();
    l.material.equilibrium.validate();
  }
  std::vector<LayerMaterial> mats;
  for (const auto& l : layers) mats.push_back(l.material);
  const double len = layers.front().sector.Ri;
  const double sig = detail::stress_scale(mats);
  double l_mean = 0.0;
  for (const auto& l : layers) l_mean += l.sector.L / layers.size();

  auto residual = [&](const VecN<2>& x) -> VecN<2> {
    const TubeState st = closed_state(layers, x[0] * len, x[1] * l_mean);
    return {net_pressure(st, opt.quadrature) / sig,
            reduced_axial_force(st, opt.quadrature) / (sig * len * len)};
  };
  const SectorGeometry& s0 = layers.front().sector;
  const VecN<2> x0{s0.Ro / std::sqrt(s0.closing_factor()) / len, 1.0};
  const NewtonReport<2> rep = newton_solve<2>(residual, x0, opt.newton);
  if (!rep.converged)
    throw NoConvergence("load-free problem did not converge", {rep.x[0] * len, rep.x[1] * l_mean},
                        {rep.residual[0] * sig, rep.residual[1] * sig * len * len}, rep.iterations);

  LoadFreeSolution sol;
  const double l = rep.x[1] * l_mean;
  sol.tube = geometry_of(closed_state(layers, rep.x[0] * len, l), l);
  sol.net_pressure = rep.residual[0] * sig;
  sol.axial_force = rep.residual[1] * sig * len * len;
  sol.iterations = rep.iterations;
  sol.history = rep.history;
  return sol;
}

/// Closed-tube state for known sectors and a known load-free geometry.
inline TubeState tube_state(std::span<const MaterialLayer> layers, const TubeGeometry& tube) {
  return closed_state(layers, tube.boundaries()[1], tube.l);
}

}  // namespace prestress
