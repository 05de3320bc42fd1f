#pragma once

/**
 * \file energy_scan.hpp
 * \brief Stored energy of a cut composite tube versus a trial opening angle.
 *
 * For a trial angle α̃ every layer is mapped from its own sector onto a common
 * circular segment of span 2π - α̃. The remaining freedoms (interface radius
 * and length of the opened segment) are fixed by minimizing the stored energy,
 * and the opening angle of the composite is the α̃ with the lowest energy.
 * Maxwell branches are taken as relaxed, so only equilibrium energy counts.
 *
 * Energies are in µJ (kPa·mm³).
 */

#include <prestress/constitutive.hpp>
#include <prestress/errors.hpp>
#include <prestress/quadrature.hpp>
#include <prestress/solvers.hpp>
#include <prestress/tube.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace prestress {

struct OpenedStateCandidate {
  double alpha_trial = 0.0;    ///< rad
  double rho_interface = 0.0;  ///< mm, outer radius of the innermost layer
  double l_open = 0.0;         ///< mm
};

inline TubeState opened_state(std::span<const MaterialLayer> layers, const OpenedStateCandidate& cand) {
  return layered_state(layers, cand.alpha_trial, cand.rho_interface, cand.l_open);
}

/// Σ over layers of ∫ W dV on each layer's stress-free sector.
inline double opened_energy(std::span<const MaterialLayer> layers, const OpenedStateCandidate& cand,
                            const QuadratureOptions& q = {}) {
  if (!(cand.alpha_trial >= 0.0 && cand.alpha_trial < two_pi))
    throw DomainError("trial opening angle outside [0, 360) degrees");
  const TubeState st = opened_state(layers, cand);
  double e = 0.0;
  for (std::size_t j = 0; j < layers.size(); ++j) {
    const SectorGeometry& s = layers[j].sector;
    const LayerKinematics& lk = st[j];
    auto density = [&](double R) {
      const Tensor2 f = sector_to_tube_F(R, lk.map);
      return equilibrium_energy(transpose(f) * f, lk.material) * R;
    };
    e += (two_pi - s.alpha) * s.L * integrate_checked(density, s.Ri, s.Ro, q).value;
  }
  return e;
}

struct EnergyScanOptions {
  NelderMeadOptions simplex{};
  NewtonOptions polish{.tol = 1e-12, .max_iter = 20, .fd_rel_step = 1e-7, .max_halvings = 8};
  QuadratureOptions quadrature{};
  double gradient_tol = 1e-8;     ///< µJ/mm, on the converged inner optimum
  double fd_gradient_step = 1e-5; ///< relative step of the central-difference gradient
  double refine_tol_deg = 0.01;   ///< golden-section bracket width
  int threads = 1;
};

struct OpenedEquilibrium {
  OpenedStateCandidate candidate;
  double energy = 0.0;         ///< µJ
  double gradient_norm = 0.0;  ///< µJ/mm, inf-norm over (rho_interface, l_open)
};

namespace detail {

/// Initial guess: the innermost layer keeps unit hoop stretch at its mid radius.
inline OpenedStateCandidate opened_guess(std::span<const MaterialLayer> layers, double alpha_trial) {
  const SectorGeometry& s = layers.front().sector;
  double l = 0.0;
  for (const auto& ly : layers) l += ly.sector.L / layers.size();
  const double k = (two_pi - alpha_trial) / (two_pi - s.alpha);
  const double c = l / s.L;
  const double R_mid = 0.5 * (s.Ri + s.Ro);
  const double rho_mid = R_mid / k;
  double rho = std::sqrt(rho_mid * rho_mid + (s.Ro * s.Ro - R_mid * R_mid) / (k * c));
  const double area = (s.Ro * s.Ro - s.Ri * s.Ri) / (k * c);
  while (rho * rho - area <= 0.01 * area) rho *= 1.1;
  return {alpha_trial, rho, l};
}

}  // namespace detail

/// Energy-minimizing opened state at a fixed trial angle: Nelder-Mead over
/// (rho_interface, l_open), then a Newton polish on the finite-difference gradient.
inline OpenedEquilibrium equilibrate_opened(std::span<const MaterialLayer> layers, double alpha_trial,
                                            const EnergyScanOptions& opt = {}) {
  if (layers.empty()) throw InvalidInput("at least one layer is required");
  const OpenedStateCandidate guess = detail::opened_guess(layers, alpha_trial);
  const double rho0 = guess.rho_interface;
  const double l0 = guess.l_open;

  auto to_candidate = [&](const VecN<2>& x) { return OpenedStateCandidate{alpha_trial, x[0] * rho0, x[1] * l0}; };
  auto energy = [&](const VecN<2>& x) {
    try {
      return opened_energy(layers, to_candidate(x), opt.quadrature);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  // gradient with respect to the physical variables, µJ/mm
  auto gradient = [&](const VecN<2>& x) -> VecN<2> {
    VecN<2> g{};
    const std::array<double, 2> scale{rho0, l0};
    for (std::size_t i = 0; i < 2; ++i) {
      const double h = opt.fd_gradient_step * std::max(std::abs(x[i]), 1e-3);
      VecN<2> xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const OpenedStateCandidate cp = to_candidate(xp), cm = to_candidate(xm);
      g[i] = (opened_energy(layers, cp, opt.quadrature) - opened_energy(layers, cm, opt.quadrature)) /
             (2.0 * h * scale[i]);
    }
    return g;
  };

  const MinimizeReport<2> nm = nelder_mead<2>(energy, VecN<2>{1.0, 1.0}, opt.simplex);
  if (!std::isfinite(nm.value)) throw NoConvergence("opened-state minimization found no admissible state");

  VecN<2> x = nm.x;
  VecN<2> g = gradient(x);
  if (inf_norm(g) >= opt.gradient_tol) {
    const NewtonReport<2> pol = newton_solve<2>(gradient, x, opt.polish);
    // a stationary point this close to the simplex minimum is that minimum
    const double shift = std::max(std::abs(pol.x[0] - x[0]), std::abs(pol.x[1] - x[1]));
    if (inf_norm(pol.residual) < inf_norm(g) && shift < 1e-4) {
      x = pol.x;
      g = pol.residual;
    }
  }
  OpenedEquilibrium out;
  out.candidate = to_candidate(x);
  out.energy = opened_energy(layers, out.candidate, opt.quadrature);
  out.gradient_norm = inf_norm(g);
  if (!(out.gradient_norm < opt.gradient_tol))
    throw NoConvergence("opened-state gradient " + format_sci(out.gradient_norm) + " uJ/mm above tolerance",
                        {out.candidate.rho_interface, out.candidate.l_open}, {g[0], g[1]}, nm.iterations);
  return out;
}

struct ScanGrid {
  double start_deg = 0.0;
  double end_deg = 180.0;
  double step_deg = 2.0;

  std::vector<double> angles_deg() const {
    if (!(step_deg > 0.0) || !(end_deg >= start_deg)) throw InvalidInput("invalid scan grid");
    if (start_deg < 0.0 || end_deg >= 360.0) throw InvalidInput("scan grid must lie in [0, 360) degrees");
    std::vector<double> a;
    const int n = static_cast<int>(std::floor((end_deg - start_deg) / step_deg + 1e-9));
    for (int i = 0; i <= n; ++i) a.push_back(start_deg + i * step_deg);
    return a;
  }
};

struct EnergySample {
  double alpha_deg = 0.0;
  double energy = 0.0;  ///< µJ
};

struct EnergyCurve {
  std::vector<EnergySample> samples;
  double argmin_deg = 0.0;
  double energy_min = 0.0;
  OpenedEquilibrium at_argmin;
};

/// Samples E(α̃) on the grid (optionally in parallel), then refines the
/// minimum by golden-section search inside the neighbouring grid cells.
inline EnergyCurve find_opening_angle(std::span<const MaterialLayer> layers, const ScanGrid& grid,
                                      const EnergyScanOptions& opt = {}) {
  for (const auto& l : layers) {
    l.sector.validate();
    l.material.equilibrium.validate();
  }
  const std::vector<double> angles = grid.angles_deg();
  EnergyCurve curve;
  curve.samples.resize(angles.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < angles.size(); i = next++) {
      try {
        const OpenedEquilibrium eq = equilibrate_opened(layers, deg_to_rad(angles[i]), opt);
        curve.samples[i] = {angles[i], eq.energy};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = angles.size();
      }
    }
  };
  const int nthreads = std::clamp(opt.threads, 1, static_cast<int>(angles.size()));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const auto best = std::min_element(curve.samples.begin(), curve.samples.end(),
                                     [](const auto& a, const auto& b) { return a.energy < b.energy; });
  const std::size_t ib = static_cast<std::size_t>(best - curve.samples.begin());
  const double lo = angles[ib == 0 ? 0 : ib - 1];
  const double hi = angles[std::min(ib + 1, angles.size() - 1)];
  ScalarMinimum m{best->alpha_deg, best->energy};
  if (hi > lo) {
    const ScalarMinimum g = golden_section(
        [&](double a_deg) { return equilibrate_opened(layers, deg_to_rad(a_deg), opt).energy; }, lo, hi,
        opt.refine_tol_deg);
    if (g.value < m.value) m = g;
  }
  curve.argmin_deg = m.x;
  curve.at_argmin = equilibrate_opened(layers, deg_to_rad(m.x), opt);
  curve.energy_min = curve.at_argmin.energy;
  return curve;
}

}  // namespace prestress
