#include <prestress/driver.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace prestress;
using fixture::media_viscous;

namespace {

LoadProgram hold_identity(double t_end, double dt) {
  return {{{0.0, Tensor2::identity()}, {t_end, Tensor2::identity()}}, dt};
}

LoadProgram step_stretch(double dt) {
  const double l = 1.3, s = 1.0 / std::sqrt(l);
  const Tensor2 f = Tensor2::diag(s, l, s);
  return {{{0.0, Tensor2::identity()}, {0.1, f}, {5.1, f}}, dt};
}

}  // namespace

TEST(LoadProgramTest, Validation) {
  EXPECT_THROW((LoadProgram{{}, 0.01}.validate()), InvalidInput);
  EXPECT_THROW((LoadProgram{{{0.5, Tensor2::identity()}}, 0.01}.validate()), InvalidInput);
  EXPECT_THROW((LoadProgram{{{0.0, Tensor2::identity()}, {0.0, Tensor2::identity()}}, 0.01}.validate()),
               InvalidInput);
  EXPECT_THROW((LoadProgram{{{0.0, Tensor2::diag(-1, 1, 1)}}, 0.01}.validate()), InvalidInput);
  EXPECT_THROW((LoadProgram{{{0.0, Tensor2::identity()}}, 0.0}.validate()), InvalidInput);
}

TEST(LoadProgramTest, PiecewiseLinearInterpolation) {
  const LoadProgram p{{{0.0, Tensor2::identity()}, {1.0, Tensor2::diag(2, 1, 1)}, {3.0, Tensor2::diag(2, 3, 1)}}, 0.1};
  EXPECT_NEAR(p.F_at(0.5)(0, 0), 1.5, 1e-15);
  EXPECT_NEAR(p.F_at(2.0)(1, 1), 2.0, 1e-15);
  EXPECT_NEAR(p.F_at(10.0)(1, 1), 3.0, 1e-15);
}

TEST(RunPoint, RestingBodyWithoutPreStressIsStressFree) {
  const PointTrace tr = run_point(hold_identity(1.0, 0.01), media_viscous(), PreStressField());
  ASSERT_EQ(tr.size(), 101u);
  for (const auto& r : tr) {
    EXPECT_LT(max_abs(r.cauchy), 1e-13);
    EXPECT_LT(r.overstress_norm, 1e-13);
  }
  EXPECT_NEAR(tr.back().t, 1.0, 1e-15);
}

TEST(RunPoint, RelaxedStartIsFixedPoint) {
  oracle::Rng rng(51);
  for (int n = 0; n < 10; ++n) {
    const PreStressField f0(oracle::random_unimodular(rng));
    const PointTrace tr = run_point(hold_identity(2.0, 0.005), media_viscous(), f0);
    const Tensor2 first = tr.front().cauchy;
    EXPECT_GT(max_abs(first), 1e-3);
    for (const auto& r : tr) {
      EXPECT_LT(r.overstress_norm, 1e-12);
      EXPECT_LT(max_abs(r.cauchy - first), 1e-12 * max_abs(first));
    }
  }
}

TEST(RunPoint, InitialStressIsEquilibriumOnly) {
  oracle::Rng rng(52);
  const LayerMaterial m = media_viscous();
  const PreStressField f0(oracle::random_unimodular(rng));
  const Tensor2 f = Tensor2::diag(1.05, 1 / 1.05, 1.0);
  const LoadProgram p{{{0.0, f}, {0.2, f}}, 0.01};
  const PointTrace tr = run_point(p, m, f0);
  const Tensor2 f_sf = f * f0.F0_inverse();
  const Tensor2 ref = symmetric_part(extra_cauchy_equilibrium(f_sf, m.equilibrium));
  EXPECT_LT(oracle::rel_diff(tr.front().cauchy, ref), 1e-12);
}

TEST(RunPoint, StepStretchRelaxes) {
  const PointTrace tr = run_point(step_stretch(1e-3), media_viscous(), PreStressField());
  double peak = 0.0;
  std::size_t ipeak = 0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr[i].overstress_norm > peak) {
      peak = tr[i].overstress_norm;
      ipeak = i;
    }
  EXPECT_GT(peak, 0.1);
  EXPECT_NEAR(tr[ipeak].t, 0.1, 1e-9);
  for (std::size_t i = ipeak + 1; i < tr.size(); ++i)
    EXPECT_LE(tr[i].overstress_norm, tr[i - 1].overstress_norm + 1e-12);  // roundoff floor, kPa
  EXPECT_LT(tr.back().overstress_norm, 1e-3 * peak);
  for (const auto& r : tr) EXPECT_NEAR(r.det_ci, 1.0, 1e-12);
}

TEST(RunPoint, StepStretchMatchesFineStepRerun) {
  const double dt = 5e-4;  // 200 steps per relaxation time; the scheme is first order
  const PointTrace coarse = run_point(step_stretch(dt), media_viscous(), PreStressField());
  const PointTrace fine = run_point(step_stretch(dt / 100.0), media_viscous(), PreStressField());
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const auto& f = fine[i * 100];
    ASSERT_NEAR(f.t, coarse[i].t, 1e-9);
    scale = std::max(scale, max_abs(f.cauchy));
    err = std::max(err, max_abs(f.cauchy - coarse[i].cauchy));
  }
  EXPECT_LT(err / scale, 1e-3);
}

TEST(RunPoint, TimeStepMustResolveRelaxation) {
  EXPECT_THROW(run_point(step_stretch(0.05), media_viscous(), PreStressField()), InvalidInput);
}

TEST(RunPoint, ShortLastStepLandsOnEndTime) {
  const PointTrace tr = run_point(hold_identity(0.105, 0.01), media_viscous(), PreStressField());
  EXPECT_EQ(tr.size(), 12u);
  EXPECT_DOUBLE_EQ(tr.back().t, 0.105);
}
