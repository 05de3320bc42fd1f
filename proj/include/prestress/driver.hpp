#pragma once

/**
 * \file driver.hpp
 * \brief Material-point driver: a prescribed F^lf history applied to one
 * pre-stressed viscoelastic layer.
 *
 * Total PK2 on the sf-configuration is the Mooney-Rivlin matrix, two Holzapfel
 * fibre families, the isotropic Maxwell branch and two fibre Maxwell branches.
 * It is pulled back to the lf-configuration through F0 and pushed forward
 * with F^lf. No pressure term is added, so the reported Cauchy stress is the
 * pressure-free part.
 */

#include <prestress/constitutive.hpp>
#include <prestress/errors.hpp>
#include <prestress/tensor.hpp>
#include <prestress/tube.hpp>
#include <prestress/viscoelastic.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace prestress {

struct Keyframe {
  double t = 0.0;  ///< s
  Tensor2 F = Tensor2::identity();
};

/// Piecewise-linear history of F^lf.
struct LoadProgram {
  std::vector<Keyframe> keyframes;
  double dt = 0.0;  ///< s

  void validate() const {
    if (keyframes.empty()) throw InvalidInput("load program needs at least one keyframe");
    if (keyframes.front().t != 0.0) throw InvalidInput("load program must start at t = 0");
    for (std::size_t i = 1; i < keyframes.size(); ++i)
      if (!(keyframes[i].t > keyframes[i - 1].t)) throw InvalidInput("keyframe times must increase strictly");
    for (const auto& k : keyframes)
      if (!(det(k.F) > 0.0)) throw InvalidInput("keyframe deformation gradients need det F > 0");
    if (!(dt > 0.0)) throw InvalidInput("time step must be positive");
  }

  double end_time() const noexcept { return keyframes.back().t; }

  Tensor2 F_at(double t) const {
    if (t <= keyframes.front().t) return keyframes.front().F;
    if (t >= keyframes.back().t) return keyframes.back().F;
    const auto it = std::upper_bound(keyframes.begin(), keyframes.end(), t,
                                     [](double v, const Keyframe& k) { return v < k.t; });
    const Keyframe& b = *it;
    const Keyframe& a = *(it - 1);
    const double s = (t - a.t) / (b.t - a.t);
    return (1.0 - s) * a.F + s * b.F;
  }
};

struct PointRecord {
  double t = 0.0;
  Tensor2 cauchy;                 ///< kPa, total pressure-free Cauchy stress
  double det_ci = 1.0;
  std::array<double, 2> lambda_i{1.0, 1.0};
  double overstress_norm = 0.0;   ///< kPa, Frobenius norm of the Maxwell part of the Cauchy stress
};

using PointTrace = std::vector<PointRecord>;

struct PointStress {
  Tensor2 equilibrium;  ///< Cauchy, kPa
  Tensor2 overstress;   ///< Cauchy, kPa
};

/// Stresses at one instant for a given internal state.
inline PointStress point_stress(const Tensor2& f_lf, const PreStressField& f0, const LayerMaterial& m,
                                const ViscousState& s) {
  const Tensor2 f_sf = f_lf * f0.F0_inverse();
  const Tensor2 c_sf = transpose(f_sf) * f_sf;
  const Tensor2 eq_sf = equilibrium_pk2_sf(c_sf, m.equilibrium);
  Tensor2 ov_sf = iso_overstress(c_sf, s.Ci, m.iso);
  const auto branches = m.fibre_maxwell();
  for (std::size_t j = 0; j < branches.size(); ++j)
    ov_sf += fibre_overstress(c_sf, s.lambda_i[j], branches[j]).stress;
  return {symmetric_part(cauchy_from_pk2(pull_back_pk2(eq_sf, f0), f_lf)),
          symmetric_part(cauchy_from_pk2(pull_back_pk2(ov_sf, f0), f_lf))};
}

/// Runs the program with fixed steps (the last one shortened to land on the end time).
/// Internal variables start relaxed on the lf-configuration.
inline PointTrace run_point(const LoadProgram& program, const LayerMaterial& layer, const PreStressField& f0) {
  program.validate();
  layer.validate(true);
  const double tau = std::min(layer.iso.relaxation_time(), layer.fibre_maxwell()[0].relaxation_time());
  if (program.dt > tau / 10.0 * (1.0 + 1e-12))
    throw InvalidInput("time step " + format_sci(program.dt) + " s does not resolve the relaxation time " +
                       format_sci(tau) + " s with 10 steps");

  const auto branches = layer.fibre_maxwell();
  const std::array<Vec3, 2> dirs{branches[0].a, branches[1].a};
  const Tensor2 f_start = program.F_at(0.0);
  ViscousState state = initial_state(f0, transpose(f_start) * f_start, dirs);

  auto record = [&](double t, const Tensor2& f_lf) {
    const PointStress ps = point_stress(f_lf, f0, layer, state);
    PointRecord r;
    r.t = t;
    r.cauchy = ps.equilibrium + ps.overstress;
    r.det_ci = det(state.Ci);
    r.lambda_i = {state.lambda_i[0], state.lambda_i[1]};
    r.overstress_norm = frobenius_norm(ps.overstress);
    return r;
  };

  PointTrace trace;
  trace.push_back(record(0.0, f_start));
  const double t_end = program.end_time();
  const auto steps = static_cast<long>(std::ceil(t_end / program.dt - 1e-9));
  double t = 0.0;
  for (long n = 1; n <= steps; ++n) {
    const double t_new = std::min(n * program.dt, t_end);
    const double h = t_new - t;
    const Tensor2 f_lf = program.F_at(t_new);
    const Tensor2 f_sf = f_lf * f0.F0_inverse();
    const Tensor2 c_sf = transpose(f_sf) * f_sf;
    state.Ci = iso_evolve_step(c_sf, state.Ci, h, layer.iso);
    for (std::size_t j = 0; j < branches.size(); ++j) {
      const double lambda = std::sqrt(fibre_stretch_sq(c_sf, branches[j].a));
      state.lambda_i[j] = fibre_evolve_step(lambda, state.lambda_i[j], h, branches[j]);
    }
    trace.push_back(record(t_new, f_lf));
    t = t_new;
  }
  return trace;
}

}  // namespace prestress
