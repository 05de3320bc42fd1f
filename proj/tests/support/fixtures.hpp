#pragma once

// Material, geometry and step-response fixtures shared by the unit tests and
// the acceptance runner.

#include <prestress/tube.hpp>
#include <prestress/viscoelastic.hpp>

#include "oracles.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace fixture {

using namespace prestress;

inline LayerMaterial make_layer(double c1, double c2, double k1, double k2, double beta_deg) {
  LayerMaterial m;
  m.equilibrium.matrix = {c1, c2};
  m.equilibrium.k1 = k1;
  m.equilibrium.k2 = k2;
  m.equilibrium.beta = deg_to_rad(beta_deg);
  return m;
}

inline LayerMaterial media() { return make_layer(3.0, 2.0, 2.3632, 0.8393, 29.0); }
inline LayerMaterial adventitia() { return make_layer(0.3, 0.2, 0.562, 0.7112, 62.0); }

/// Media with all Maxwell branches; relaxation times 0.1 s.
inline LayerMaterial media_viscous() {
  LayerMaterial m = media();
  m.iso = {5.0, 0.5};
  m.k1v = 5.3;
  m.k2v = 0.8393;
  m.eta_f = 0.53;
  return m;
}

/// Carotid load-free tube, mm.
inline TubeGeometry carotid() {
  TubeGeometry g;
  g.ri = 0.71;
  g.r_interface = 0.97;
  g.ro = 1.1;
  g.l = 3.0;
  return g;
}

/// Reference stress-free sectors of the carotid tube at 160 degrees.
struct CarotidSectors {
  double Ri = 1.3948, R_interface = 1.6589, Ro = 1.8024, L = 2.9251;
};

/// Two incompatible sectors (160 and 140 degrees) with their load-free tube.
inline std::vector<MaterialLayer> locking_layers() {
  return {{SectorGeometry{1.0, 1.4, 1.0, deg_to_rad(160.0)}, media()},
          {SectorGeometry{1.5, 1.8, 1.0, deg_to_rad(140.0)}, adventitia()}};
}

struct LockingTube {
  double ri = 0.4852, r_interface = 0.8749, ro = 1.1691, l = 1.0063;
};

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// dCi/dt = (μ/η) (C̄ - tr(C̄ Ci^{-1})/3 Ci), written out with the adjugate inverse.
inline std::array<double, 9> iso_rhs(const Tensor2& cbar, const std::array<double, 9>& y, double rate) {
  Tensor2 ci;
  ci.c = y;
  const Tensor2 inv = oracle::adjugate_inverse(ci);
  double tr = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tr += cbar(i, j) * inv(j, i);
  std::array<double, 9> d;
  for (int k = 0; k < 9; ++k) d[k] = rate * (cbar.c[k] - tr / 3.0 * y[k]);
  return d;
}

struct IsoRun {
  double max_err = 0.0;
  double max_det_drift = 0.0;
};

/// Isotropic branch under a held isochoric stretch of 1.2, from Ci = I.
inline IsoRun iso_step_response(double dt, double t_end) {
  const IsoMaxwellParams p{5.0, 5.0};
  const Tensor2 c = Tensor2::diag(1.44, 1 / 1.2, 1 / 1.2);
  const Tensor2 cbar = c;  // det = 1 already
  const int steps = static_cast<int>(std::lround(t_end / dt));
  std::vector<double> times;
  for (int n = 1; n <= steps; ++n) times.push_back(n * dt);
  const auto ref = oracle::rk4_reference<9>(
      [&](const std::array<double, 9>& y) { return iso_rhs(cbar, y, p.mu / p.eta); }, Tensor2::identity().c, times);
  IsoRun run;
  Tensor2 ci = Tensor2::identity();
  for (int n = 0; n < steps; ++n) {
    ci = iso_evolve_step(c, ci, dt, p);
    for (int k = 0; k < 9; ++k) run.max_err = std::max(run.max_err, std::abs(ci.c[k] - ref[n][k]));
    run.max_det_drift = std::max(run.max_det_drift, std::abs(oracle::cofactor_det(ci) - 1.0));
  }
  return run;
}

/// Max |det Ci - 1| over 10⁴ steps driven by random SPD C.
inline double iso_det_drift(std::uint64_t seed, int steps = 10000) {
  const IsoMaxwellParams p{5.0, 5.0};
  oracle::Rng rng(seed);
  Tensor2 ci = Tensor2::identity();
  double drift = 0.0;
  for (int n = 0; n < steps; ++n) {
    const Tensor2 c = oracle::random_spd(rng, 0.7, 1.4);
    ci = iso_evolve_step(c, ci, 1e-3, p);
    drift = std::max(drift, std::abs(oracle::cofactor_det(ci) - 1.0));
  }
  return drift;
}

struct FibreRun {
  double max_err = 0.0;
  double final_lambda_i = 0.0;
};

/// Fibre branch under a held fibre stretch of 1.3, from λi = 1.
inline FibreRun fibre_step_response(double dt, double t_end) {
  const FibreMaxwellParams p{5.3, 0.8393, 5.3, {0, 1, 0}};
  const double lambda = 1.3;
  const int steps = static_cast<int>(std::lround(t_end / dt));
  std::vector<double> times;
  for (int n = 1; n <= steps; ++n) times.push_back(n * dt);
  // dλi/dt = λi f(λe²) λe² / η with f(y) = 2 k1v (y - 1) exp(k2v (y - 1)²)
  const auto ref = oracle::rk4_reference<1>(
      [&](const std::array<double, 1>& y) {
        const double le2 = lambda * lambda / (y[0] * y[0]);
        const double f = 2.0 * p.k1v * (le2 - 1.0) * std::exp(p.k2v * (le2 - 1.0) * (le2 - 1.0));
        return std::array<double, 1>{y[0] * f * le2 / p.eta_f};
      },
      {1.0}, times);
  FibreRun run;
  double li = 1.0;
  for (int n = 0; n < steps; ++n) {
    li = fibre_evolve_step(lambda, li, dt, p);
    run.max_err = std::max(run.max_err, std::abs(li - ref[n][0]));
  }
  run.final_lambda_i = li;
  return run;
}

}  // namespace fixture
