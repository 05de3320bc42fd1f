#pragma once

/**
 * \file constitutive.hpp
 * \brief Equilibrium (hyperelastic) response of the fibre-reinforced matrix.
 *
 * All energies are stored per unit reference volume (kPa), so the mass
 * density never appears on its own. Stresses are evaluated on the local
 * stress-free (sf) configuration and carried to the load-free (lf)
 * configuration through the unimodular field F0, where F^sf = F^lf F0^{-1}.
 */

#include <prestress/errors.hpp>
#include <prestress/tensor.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace prestress {

/// Two-term Mooney-Rivlin matrix, W = c1/2 (tr C̄ - 3) + c2/2 (tr C̄^{-1} - 3).
struct MooneyRivlinParams {
  double c1 = 0.0;  ///< kPa
  double c2 = 0.0;  ///< kPa

  void validate() const {
    if (!(c1 >= 0.0 && c2 >= 0.0 && c1 + c2 > 0.0))
      throw InvalidInput("Mooney-Rivlin parameters need c1 >= 0, c2 >= 0, c1 + c2 > 0");
  }
};

/// One Holzapfel fibre family, W = k1/(2 k2) (exp(k2 (λ² - 1)²) - 1) with λ² = a·C̄·a.
struct HolzapfelFibreParams {
  double k1 = 0.0;  ///< kPa
  double k2 = 0.0;
  Vec3 a{1.0, 0.0, 0.0};  ///< unit fibre direction on the sf-configuration
  /// Drop the fibre response for λ² < 1. Off: fibres carry compression too.
  bool tension_only = false;

  void validate() const {
    if (!(k1 > 0.0 && k2 > 0.0)) throw InvalidInput("Holzapfel fibre needs k1 > 0 and k2 > 0");
    if (std::abs(norm(a) - 1.0) > 1e-12) throw InvalidInput("fibre direction must be a unit vector");
  }
};

/// Pre-stress field F0 carrying the lf-configuration onto the sf-configuration.
class PreStressField {
 public:
  static constexpr double det_tolerance = 1e-10;

  PreStressField() = default;
  explicit PreStressField(const Tensor2& f0) : f0_(f0) {
    if (std::abs(det(f0) - 1.0) > det_tolerance)
      throw InvalidInput("F0 must be unimodular, det F0 = " + format_sci(det(f0)));
    f0_inv_ = inverse(f0);
  }

  const Tensor2& F0() const noexcept { return f0_; }
  const Tensor2& F0_inverse() const noexcept { return f0_inv_; }

 private:
  Tensor2 f0_ = Tensor2::identity();
  Tensor2 f0_inv_ = Tensor2::identity();
};

/// Fibre direction (0, cos β, ±sin β) in the cylindrical triad; β measured from the hoop direction.
inline Vec3 helical_fibre(double beta_rad, int sign) noexcept {
  return {0.0, std::cos(beta_rad), sign >= 0 ? std::sin(beta_rad) : -std::sin(beta_rad)};
}

// --- configuration changes ---------------------------------------------------

/// C^sf = F0^{-T} C^lf F0^{-1}.
inline Tensor2 csf_from_clf(const Tensor2& c_lf, const PreStressField& f0) {
  const Tensor2& fi = f0.F0_inverse();
  return symmetric_part(transpose(fi) * c_lf * fi);
}

/// C^lf = F0^T C^sf F0.
inline Tensor2 clf_from_csf(const Tensor2& c_sf, const PreStressField& f0) {
  return symmetric_part(transpose(f0.F0()) * c_sf * f0.F0());
}

/// T̃^lf = F0^{-1} T̃^sf F0^{-T}.
inline Tensor2 pull_back_pk2(const Tensor2& t_sf, const PreStressField& f0) {
  const Tensor2& fi = f0.F0_inverse();
  return fi * t_sf * transpose(fi);
}

/// T = (det F)^{-1} F T̃ F^T.
inline Tensor2 cauchy_from_pk2(const Tensor2& pk2, const Tensor2& f) {
  const double j = det(f);
  if (!(j > 0.0)) throw NonPositiveDeterminant("cauchy_from_pk2: det F = " + format_sci(j));
  return (1.0 / j) * (f * pk2 * transpose(f));
}

/// P_C : X = X - 1/3 tr(C X) C^{-1}.
inline Tensor2 projector_c(const Tensor2& c, const Tensor2& c_inv, const Tensor2& x) noexcept {
  return x - (ddot(c, transpose(x)) / 3.0) * c_inv;
}

// --- Mooney-Rivlin -----------------------------------------------------------

inline double mooney_rivlin_energy(const Tensor2& c_sf, const MooneyRivlinParams& p) {
  const Tensor2 cbar = unimodular(c_sf);
  return 0.5 * p.c1 * (trace(cbar) - 3.0) + 0.5 * p.c2 * (trace(inverse(cbar)) - 3.0);
}

/// T̃ = C^{-1} (c1 C̄ - c2 C̄^{-1})^D.
inline Tensor2 mooney_rivlin_pk2_sf(const Tensor2& c_sf, const MooneyRivlinParams& p) {
  const Tensor2 cbar = unimodular(c_sf);
  const Tensor2 c_inv = inverse(c_sf);
  return symmetric_part(c_inv * deviator(p.c1 * cbar - p.c2 * inverse(cbar)));
}

// --- Holzapfel fibres ----------------------------------------------------------

/// λ² = a·C̄·a.
inline double fibre_stretch_sq(const Tensor2& c_sf, const Vec3& a) {
  return dot(a, unimodular(c_sf) * a);
}

/// dW/dλ² of the equilibrium fibre potential.
inline double holzapfel_dw(double lambda_sq, const HolzapfelFibreParams& p) noexcept {
  if (p.tension_only && lambda_sq < 1.0) return 0.0;
  const double e = lambda_sq - 1.0;
  return p.k1 * e * std::exp(p.k2 * e * e);
}

inline double holzapfel_energy(const Tensor2& c_sf, const HolzapfelFibreParams& p) {
  const double e = fibre_stretch_sq(c_sf, p.a) - 1.0;
  if (p.tension_only && e < 0.0) return 0.0;
  return p.k1 / (2.0 * p.k2) * std::expm1(p.k2 * e * e);
}

/// d(λ²)/dC for λ² = a·C̄·a, i.e. J^{-2/3} P_C : (a ⊗ a).
inline Tensor2 fibre_stretch_sq_gradient(const Tensor2& c_sf, const Vec3& a) {
  const double j23 = std::cbrt(1.0 / det(c_sf));
  return j23 * symmetric_part(projector_c(c_sf, inverse(c_sf), dyad(a, a)));
}

/// T̃ = 2 dW/dλ² · d(λ²)/dC.
inline Tensor2 holzapfel_pk2_sf(const Tensor2& c_sf, const HolzapfelFibreParams& p) {
  const double lsq = fibre_stretch_sq(c_sf, p.a);
  return 2.0 * holzapfel_dw(lsq, p) * fibre_stretch_sq_gradient(c_sf, p.a);
}

// --- layer equilibrium material ---------------------------------------------------

/// Equilibrium part of one tube layer: the matrix plus two fibre families at ±β.
struct EquilibriumMaterial {
  MooneyRivlinParams matrix;
  double k1 = 0.0;    ///< kPa
  double k2 = 0.0;
  double beta = 0.0;  ///< rad, from the hoop direction
  bool tension_only_fibres = false;

  std::array<HolzapfelFibreParams, 2> fibres() const {
    return {HolzapfelFibreParams{k1, k2, helical_fibre(beta, +1), tension_only_fibres},
            HolzapfelFibreParams{k1, k2, helical_fibre(beta, -1), tension_only_fibres}};
  }

  void validate() const {
    matrix.validate();
    for (const auto& f : fibres()) f.validate();
  }
};

inline double equilibrium_energy(const Tensor2& c_sf, const EquilibriumMaterial& m) {
  double w = mooney_rivlin_energy(c_sf, m.matrix);
  for (const auto& f : m.fibres()) w += holzapfel_energy(c_sf, f);
  return w;
}

inline Tensor2 equilibrium_pk2_sf(const Tensor2& c_sf, const EquilibriumMaterial& m) {
  Tensor2 t = mooney_rivlin_pk2_sf(c_sf, m.matrix);
  for (const auto& f : m.fibres()) t += holzapfel_pk2_sf(c_sf, f);
  return t;
}

/// Pressure-free ("extra") Cauchy stress of an incompressible deformation from
/// the sf-configuration. Only differences of normal components are physical.
inline Tensor2 extra_cauchy_equilibrium(const Tensor2& f_sf, const EquilibriumMaterial& m) {
  const double j = det(f_sf);
  if (std::abs(j - 1.0) > 1e-10)
    throw DomainError("extra_cauchy_equilibrium needs det F = 1, got " + format_sci(j));
  const Tensor2 c = transpose(f_sf) * f_sf;
  return symmetric_part(cauchy_from_pk2(equilibrium_pk2_sf(c, m), f_sf));
}

inline double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

}  // namespace prestress
