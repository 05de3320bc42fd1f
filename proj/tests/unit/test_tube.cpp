#include <prestress/tube.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace prestress;
using namespace fixture;

TEST(OpeningMapTest, NoPreStrainIsIdentity) {
  const OpeningMap m{1.0, 1.0, 0.8, 0.8};
  for (double r : {0.8, 0.9, 1.2}) {
    EXPECT_NEAR(f_lf(r, m), 1.0, 1e-15);
    EXPECT_LT(max_abs(F0_at(r, m) - Tensor2::identity()), 1e-15);
    EXPECT_LT(max_abs(sector_to_tube_F(r, m) - Tensor2::identity()), 1e-15);
  }
}

TEST(OpeningMapTest, InnerRadiusSubstitution) {
  const double k = two_pi / (two_pi - deg_to_rad(160.0));
  const OpeningMap m{k, 3.0 / 2.9251, 0.71, 1.3948};
  EXPECT_NEAR(f_lf(0.71, m), k * 0.71 / 1.3948, 1e-14);
  EXPECT_NEAR(sector_to_tube_F(1.3948, m)(1, 1), k * 0.71 / 1.3948, 1e-14);
}

TEST(OpeningMapTest, LfAndSfStretchesAgree) {
  const OpeningMap m{1.8, 1.03, 0.71, 1.39};
  for (double r = 0.71; r <= 0.97; r += 0.013) EXPECT_NEAR(f_sf(m.R_of_r(r), m), f_lf(r, m), 1e-14);
}

TEST(OpeningMapTest, F0MatchesMapGradient) {
  const double k = two_pi / (two_pi - deg_to_rad(160.0));
  const double c = 3.0 / 2.9251;
  const OpeningMap m{k, c, 0.71, 1.3948};
  const double r = 0.5 * (0.71 + 0.97);
  // R(r) = sqrt(Ri² + k c (r² - ri²)), Θ = θ/k, Z = z/c
  auto R = [&](double x) { return std::sqrt(1.3948 * 1.3948 + k * c * (x * x - 0.71 * 0.71)); };
  const double h = 1e-6;
  const double dR = (R(r + h) - R(r - h)) / (2 * h);
  const Tensor2 ref = Tensor2::diag(dR, R(r) / (k * r), 1.0 / c);
  EXPECT_LT(max_abs(F0_at(r, m) - ref), 1e-9);
  EXPECT_NEAR(det(F0_at(r, m)), 1.0, 1e-14);
}

TEST(OpeningMapTest, DeterminantOneOnRandomStates) {
  oracle::Rng rng(41);
  for (int n = 0; n < 100; ++n) {
    const OpeningMap m{rng.uniform(1.0, 3.0), rng.uniform(0.7, 1.4), rng.uniform(0.3, 1.0), rng.uniform(0.5, 1.5)};
    const double R = m.Ri * rng.uniform(1.0, 1.5);
    EXPECT_NEAR(det(sector_to_tube_F(R, m)), 1.0, 1e-12);
    EXPECT_NEAR(det(F0_at(m.r_of_R(R), m)), 1.0, 1e-14);
  }
}

TEST(OpeningMapTest, NegativeRadicandThrows) {
  const OpeningMap m{2.0, 1.0, 1.0, 0.1};
  EXPECT_THROW(m.R_of_r(0.5), DomainError);
}

TEST(Equilibrium, ZeroPreStrainGivesZero) {
  const std::vector<MaterialLayer> layers{{SectorGeometry{0.8, 1.1, 2.0, 0.0}, media()}};
  const TubeState st = closed_state(layers, 1.1, 2.0);
  EXPECT_LT(std::abs(net_pressure(st)), 1e-13);
  EXPECT_LT(std::abs(reduced_axial_force(st)), 1e-13);
  for (const auto& s : wall_stress_profile(st)) EXPECT_LT(std::abs(s.T_tt - s.T_rr), 1e-12);
}

TEST(Equilibrium, ReferenceCarotidGeometryIsLoadFree) {
  const double alpha = deg_to_rad(160.0);
  const std::vector<LayerMaterial> mats{media(), adventitia()};
  const auto layers = sectors_for_tube(carotid(), alpha, 1.3948, 2.9251, mats);
  const TubeState st = tube_state(layers, carotid());
  EXPECT_LT(std::abs(net_pressure(st)), 1e-6);
  EXPECT_LT(std::abs(reduced_axial_force(st)), 1e-6);
}

TEST(Equilibrium, AxialForceRootUniqueUnderInflation) {
  LayerMaterial m = make_layer(3.0, 2.0, 1e-300, 1.0, 0.0);  // matrix only
  const double Ri = 1.0, Ro = 1.2, ri = 1.1;
  int sign_changes = 0;
  double prev = 0.0;
  for (int i = 0; i <= 160; ++i) {
    const double c = 0.7 + 0.005 * i;
    const OpeningMap map{1.0, c, ri, Ri};
    const TubeState st{{m.equilibrium, map, ri, map.r_of_R(Ro)}};
    const double f = reduced_axial_force(st);
    if (i > 0 && (f > 0) != (prev > 0)) ++sign_changes;
    prev = f;
  }
  EXPECT_EQ(sign_changes, 1);
}

TEST(InverseSolve, ZeroAngleReturnsTube) {
  TubeGeometry g;
  g.ri = 0.7;
  g.ro = 1.0;
  g.l = 2.0;
  const std::vector<LayerMaterial> mats{media()};
  const InverseSolution sol = solve_inverse_sf(g, 0.0, mats);
  EXPECT_NEAR(sol.sectors[0].Ri, 0.7, 1e-9);
  EXPECT_NEAR(sol.sectors[0].Ro, 1.0, 1e-9);
  EXPECT_NEAR(sol.sectors[0].L, 2.0, 1e-9);
}

TEST(InverseSolve, CarotidReferenceSectors) {
  const std::vector<LayerMaterial> mats{media(), adventitia()};
  const InverseSolution sol = solve_inverse_sf(carotid(), deg_to_rad(160.0), mats);
  EXPECT_LT(rel(sol.sectors[0].Ri, 1.3948), 0.01);
  EXPECT_LT(rel(sol.sectors[0].Ro, 1.6589), 0.01);
  EXPECT_LT(rel(sol.sectors[1].Ro, 1.8024), 0.01);
  EXPECT_LT(rel(sol.sectors[0].L, 2.9251), 0.01);
}

TEST(InverseSolve, ResidualsIncompressibilityAndConvergenceHistory) {
  const std::vector<LayerMaterial> mats{media(), adventitia()};
  const TubeGeometry g = carotid();
  const double alpha = deg_to_rad(160.0);
  const InverseSolution sol = solve_inverse_sf(g, alpha, mats);
  EXPECT_LT(std::abs(sol.net_pressure), 1e-8);
  EXPECT_LT(std::abs(sol.axial_force), 1e-8);
  const std::vector<double> rb = g.boundaries();
  for (std::size_t j = 0; j < 2; ++j) {
    const SectorGeometry& s = sol.sectors[j];
    const double sf = s.L * (two_pi - alpha) * (s.Ro * s.Ro - s.Ri * s.Ri);
    const double lf = g.l * two_pi * (rb[j + 1] * rb[j + 1] - rb[j] * rb[j]);
    EXPECT_NEAR(sf, lf, 1e-12 * lf);
  }
  EXPECT_LE(sol.iterations, 25);
  for (std::size_t i = 2; i < sol.history.size(); ++i) EXPECT_LT(sol.history[i], sol.history[i - 1]);
}

TEST(InverseSolve, QuadratureRefinementInsensitive) {
  const std::vector<LayerMaterial> mats{media(), adventitia()};
  const InverseSolution sol = solve_inverse_sf(carotid(), deg_to_rad(160.0), mats);
  std::vector<MaterialLayer> layers;
  for (std::size_t j = 0; j < 2; ++j) layers.push_back({sol.sectors[j], mats[j]});
  const TubeState st = tube_state(layers, carotid());
  QuadratureOptions fine;
  fine.points = 64;
  EXPECT_LT(std::abs(net_pressure(st, fine) - net_pressure(st)), 1e-8);
  EXPECT_LT(std::abs(reduced_axial_force(st, fine) - reduced_axial_force(st)), 1e-8);
}

TEST(InverseSolve, InvalidInputs) {
  const std::vector<LayerMaterial> one{media()};
  EXPECT_THROW(solve_inverse_sf(carotid(), 1.0, one), InvalidInput);
  TubeGeometry bad = carotid();
  bad.ro = 0.5;
  const std::vector<LayerMaterial> two{media(), adventitia()};
  EXPECT_THROW(solve_inverse_sf(bad, 1.0, two), InvalidInput);
  EXPECT_THROW(solve_inverse_sf(carotid(), two_pi, two), InvalidInput);
}

TEST(LoadFree, LockingReferenceGeometry) {
  const LoadFreeSolution sol = solve_load_free(locking_layers());
  EXPECT_LT(rel(sol.tube.ri, 0.4852), 0.01);
  EXPECT_LT(rel(*sol.tube.r_interface, 0.8749), 0.01);
  EXPECT_LT(rel(sol.tube.ro, 1.1691), 0.01);
  EXPECT_LT(rel(sol.tube.l, 1.0063), 0.01);
}

TEST(LoadFree, ResidualsAndConvergenceHistory) {
  const LoadFreeSolution sol = solve_load_free(locking_layers());
  EXPECT_LT(std::abs(sol.net_pressure), 1e-8);
  EXPECT_LT(std::abs(sol.axial_force), 1e-8);
  EXPECT_LE(sol.iterations, 25);
  for (std::size_t i = 2; i < sol.history.size(); ++i) EXPECT_LT(sol.history[i], sol.history[i - 1]);
  // T_rr returns to zero on the outer surface when the net pressure vanishes
  const auto prof = wall_stress_profile(tube_state(locking_layers(), sol.tube));
  EXPECT_NEAR(prof.front().T_rr, 0.0, 1e-15);
  EXPECT_NEAR(prof.back().T_rr, 0.0, 1e-7);
}

TEST(LoadFree, IdenticalLayersRecoverInverseTube) {
  const std::vector<LayerMaterial> mats{media(), adventitia()};
  const InverseSolution inv = solve_inverse_sf(carotid(), deg_to_rad(160.0), mats);
  std::vector<MaterialLayer> layers;
  for (std::size_t j = 0; j < 2; ++j) layers.push_back({inv.sectors[j], mats[j]});
  const LoadFreeSolution lf = solve_load_free(layers);
  EXPECT_NEAR(lf.tube.ri, 0.71, 1e-6);
  EXPECT_NEAR(*lf.tube.r_interface, 0.97, 1e-6);
  EXPECT_NEAR(lf.tube.ro, 1.1, 1e-6);
  EXPECT_NEAR(lf.tube.l, 3.0, 1e-6);
}

TEST(LoadFree, ThinOuterLayerLimit) {
  const SectorGeometry inner{1.0, 1.4, 1.0, deg_to_rad(160.0)};
  const std::vector<MaterialLayer> single{{inner, media()}};
  const std::vector<MaterialLayer> thin{{inner, media()},
                                        {SectorGeometry{1.5, 1.5 + 1e-6, 1.0, deg_to_rad(140.0)}, adventitia()}};
  const LoadFreeSolution a = solve_load_free(single);
  const LoadFreeSolution b = solve_load_free(thin);
  EXPECT_NEAR(a.tube.ri, b.tube.ri, 1e-4);
  EXPECT_NEAR(a.tube.ro, *b.tube.r_interface, 1e-4);
  EXPECT_NEAR(a.tube.l, b.tube.l, 1e-4);
}

TEST(LoadFree, RejectsBadLayerCounts) {
  EXPECT_THROW(solve_load_free(std::vector<MaterialLayer>{}), InvalidInput);
  auto three = locking_layers();
  three.push_back(three.back());
  EXPECT_THROW(solve_load_free(three), InvalidInput);
}

TEST(RoundTrip, SectorToTubeToSector) {
  oracle::Rng rng(42);
  for (int n = 0; n < 5; ++n) {
    const SectorGeometry s{rng.uniform(0.8, 1.2), 0.0, rng.uniform(0.8, 2.0), deg_to_rad(rng.uniform(40.0, 170.0))};
    SectorGeometry sec = s;
    sec.Ro = s.Ri + rng.uniform(0.2, 0.5);
    const std::vector<MaterialLayer> layers{{sec, rng.uniform(0, 1) < 0.5 ? media() : adventitia()}};
    const LoadFreeSolution lf = solve_load_free(layers);
    const std::vector<LayerMaterial> mats{layers[0].material};
    const InverseSolution inv = solve_inverse_sf(lf.tube, sec.alpha, mats);
    EXPECT_NEAR(inv.sectors[0].Ri, sec.Ri, 1e-6);
    EXPECT_NEAR(inv.sectors[0].Ro, sec.Ro, 1e-6);
    EXPECT_NEAR(inv.sectors[0].L, sec.L, 1e-6);
  }
}
