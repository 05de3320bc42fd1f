#pragma once

/**
 * \file viscoelastic.hpp
 * \brief Isotropic and fibre-like Maxwell branches on the sf-configuration.
 *
 * Internal variables are the inelastic right Cauchy-Green tensor Ci (one per
 * layer) and the inelastic fibre stretches λi (one per fibre family). Both
 * integrators are pure step functions: state in, state out.
 */

#include <prestress/constitutive.hpp>
#include <prestress/errors.hpp>
#include <prestress/tensor.hpp>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace prestress {

struct IsoMaxwellParams {
  double mu = 0.0;   ///< kPa
  double eta = 0.0;  ///< kPa·s

  void validate() const {
    if (!(mu > 0.0 && eta > 0.0)) throw InvalidInput("isotropic Maxwell branch needs mu > 0, eta > 0");
  }
  double relaxation_time() const noexcept { return eta / mu; }
};

/// Fibre Maxwell branch, W = k1v/k2v (exp(k2v (λe² - 1)²) - 1).
struct FibreMaxwellParams {
  double k1v = 0.0;    ///< kPa
  double k2v = 0.0;
  double eta_f = 0.0;  ///< kPa·s
  Vec3 a{1.0, 0.0, 0.0};

  void validate() const {
    if (!(k1v > 0.0 && k2v > 0.0 && eta_f > 0.0))
      throw InvalidInput("fibre Maxwell branch needs k1v > 0, k2v > 0, eta_f > 0");
    if (std::abs(norm(a) - 1.0) > 1e-12) throw InvalidInput("fibre direction must be a unit vector");
  }
  double relaxation_time() const noexcept { return eta_f / k1v; }
};

struct ViscousState {
  Tensor2 Ci = Tensor2::identity();
  std::vector<double> lambda_i;
};

// --- isotropic branch ------------------------------------------------------------

namespace detail {
inline void check_ci(const Tensor2& ci) {
  const double d = det(ci);
  if (std::abs(d - 1.0) > 1e-8)
    throw InvalidInput("inelastic Cauchy-Green tensor must be unimodular, det = " + format_sci(d));
}
}  // namespace detail

/// μ/2 (tr(C̄ Ci^{-1}) - 3).
inline double iso_maxwell_energy(const Tensor2& c_sf, const Tensor2& ci, const IsoMaxwellParams& p) {
  return 0.5 * p.mu * (trace(unimodular(c_sf) * inverse(ci)) - 3.0);
}

/// T̃ = μ C^{-1} (C̄ Ci^{-1})^D.
inline Tensor2 iso_overstress(const Tensor2& c_sf, const Tensor2& ci, const IsoMaxwellParams& p) {
  detail::check_ci(ci);
  return symmetric_part(p.mu * (inverse(c_sf) * deviator(unimodular(c_sf) * inverse(ci))));
}

/// Right-hand side of dCi/dt = (μ/η) (C̄ Ci^{-1})^D Ci.
inline Tensor2 iso_evolution_rate(const Tensor2& c_sf, const Tensor2& ci, const IsoMaxwellParams& p) {
  return (p.mu / p.eta) * (deviator(unimodular(c_sf) * inverse(ci)) * ci);
}

/// Implicit Euler step of the Ci flow. Solving the implicit equation for
/// Ci_new gives Ci_new ∝ Ci_old + dt μ/η C̄_new, and det Ci_new = 1 fixes the
/// scale, so the update is closed form.
inline Tensor2 iso_evolve_step(const Tensor2& c_sf_new, const Tensor2& ci_old, double dt,
                               const IsoMaxwellParams& p) {
  if (!(dt > 0.0)) throw InvalidInput("iso_evolve_step: dt must be positive");
  detail::check_ci(ci_old);
  const Tensor2 trial = ci_old + (dt * p.mu / p.eta) * unimodular(c_sf_new);
  return symmetric_part(unimodular(trial));
}

// --- fibre branch ------------------------------------------------------------------

/// f(y) = 2 k1v (y - 1) exp(k2v (y - 1)²), the derivative of the branch energy in y = λe².
inline double fibre_maxwell_f(double lambda_e_sq, const FibreMaxwellParams& p) noexcept {
  const double e = lambda_e_sq - 1.0;
  return 2.0 * p.k1v * e * std::exp(p.k2v * e * e);
}

inline double fibre_maxwell_energy(double lambda, double lambda_i, const FibreMaxwellParams& p) {
  const double e = (lambda / lambda_i) * (lambda / lambda_i) - 1.0;
  return p.k1v / p.k2v * std::expm1(p.k2v * e * e);
}

struct FibreOverstress {
  double prefactor = 0.0;  ///< f(λe²)/λi²
  Tensor2 stress;          ///< PK2 on the sf-configuration
};

/// Scalar part f(λe²)/λi² with λe = λ/λi.
inline double fibre_overstress_factor(double lambda, double lambda_i, const FibreMaxwellParams& p) {
  if (!(lambda > 0.0 && lambda_i > 0.0))
    throw NonPositiveStretch("fibre stretches must be positive");
  const double le = lambda / lambda_i;
  return fibre_maxwell_f(le * le, p) / (lambda_i * lambda_i);
}

/// T̃ = 2 f(λe²)/λi² · d(λ²)/dC, with λ² = a·C̄·a taken from C.
inline FibreOverstress fibre_overstress(const Tensor2& c_sf, double lambda_i, const FibreMaxwellParams& p) {
  const double lambda = std::sqrt(fibre_stretch_sq(c_sf, p.a));
  FibreOverstress out;
  out.prefactor = fibre_overstress_factor(lambda, lambda_i, p);
  out.stress = 2.0 * out.prefactor * fibre_stretch_sq_gradient(c_sf, p.a);
  return out;
}

/// d(ln λi)/dt = f(λe²) λe² / η.
inline double fibre_log_rate(double lambda, double lambda_i, const FibreMaxwellParams& p) noexcept {
  const double le_sq = (lambda / lambda_i) * (lambda / lambda_i);
  return fibre_maxwell_f(le_sq, p) * le_sq / p.eta_f;
}

/// Backward Euler on x = ln λi, solved by a bracketed Newton iteration with
/// bisection fallback. The root lies between ln λi_old and ln λ, where the
/// elastic stretch reaches one.
inline double fibre_evolve_step(double lambda_new, double lambda_i_old, double dt, const FibreMaxwellParams& p) {
  constexpr double abs_tol = 1e-12;
  constexpr int max_iter = 50;
  constexpr double le_min = 0.2;
  constexpr double le_max = 5.0;
  if (!(dt > 0.0)) throw InvalidInput("fibre_evolve_step: dt must be positive");
  if (!(lambda_new > 0.0 && lambda_i_old > 0.0)) throw NonPositiveStretch("fibre stretches must be positive");
  const double le_old = lambda_new / lambda_i_old;
  if (le_old < le_min || le_old > le_max)
    throw NoConvergence("fibre_evolve_step: elastic stretch " + format_sci(le_old) + " outside [0.2, 5]");

  const double x_old = std::log(lambda_i_old);
  const double x_fix = std::log(lambda_new);
  if (x_old == x_fix) return lambda_i_old;

  const double c = dt / p.eta_f;
  auto residual = [&](double x, double& slope) {
    const double y = lambda_new * lambda_new * std::exp(-2.0 * x);
    const double e = y - 1.0;
    const double ex = std::exp(p.k2v * e * e);
    const double g = 2.0 * p.k1v * e * ex * y;  // f(y) y
    const double dg_dy = 2.0 * p.k1v * ex * ((2.0 * y - 1.0) + 2.0 * p.k2v * e * e * y);
    slope = 1.0 + c * dg_dy * 2.0 * y;
    return x - x_old - c * g;
  };

  double lo = std::min(x_old, x_fix);
  double hi = std::max(x_old, x_fix);
  double x = x_old;
  for (int it = 0; it < max_iter; ++it) {
    double slope = 0.0;
    const double r = residual(x, slope);
    // the old state is never accepted as is, or slow relaxation would stall
    if (r == 0.0 || (it > 0 && std::abs(r) < abs_tol)) {
      const double le = lambda_new / std::exp(x);
      if (le < le_min || le > le_max) break;
      return std::exp(x);
    }
    // residual is negative below the root and positive above it
    if (r < 0.0)
      lo = x;
    else
      hi = x;
    double next = x - r / slope;
    if (!(slope > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < abs_tol) {
      x = 0.5 * (lo + hi);
      return std::exp(x);
    }
    x = next;
  }
  throw NoConvergence("fibre_evolve_step: local solve did not converge", {std::exp(x)}, {}, max_iter);
}

// --- initial conditions ------------------------------------------------------------

/// Relaxed start on the lf-configuration: Ci = C̄^sf and λi = λ at t = 0.
inline ViscousState initial_state(const PreStressField& f0, const Tensor2& c_lf_initial,
                                  std::span<const Vec3> fibre_directions) {
  const Tensor2 c_sf = csf_from_clf(c_lf_initial, f0);
  ViscousState s;
  s.Ci = symmetric_part(unimodular(c_sf));
  s.lambda_i.reserve(fibre_directions.size());
  for (const Vec3& a : fibre_directions) s.lambda_i.push_back(std::sqrt(dot(a, s.Ci * a)));
  return s;
}

}  // namespace prestress
