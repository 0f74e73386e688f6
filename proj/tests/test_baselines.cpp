#include <gtest/gtest.h>

#include <cmath>

#include "lowner/baselines.hpp"
#include "lowner/instances.hpp"

using namespace lowner;

TEST(Baselines, SmvieSquare) {
  const SmvieResult r = solve_smvie(Polytope::unit_box(2));
  // Inscribed disc of radius 1/2 scaled by K = 2.
  EXPECT_NEAR(r.outer.volume(), 1.0, 1e-6);
  EXPECT_NEAR(r.primal_objective, r.dual_objective, 1e-6);
  EXPECT_TRUE(verify_smvie_dual(Polytope::unit_box(2), r.dual).passed);
}

TEST(Baselines, SmvieGapOnRandomPolytopes) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Polytope P = random_polytope(3, 6, seed);
    const SmvieResult r = solve_smvie(P);
    EXPECT_NEAR(r.primal_objective, r.dual_objective, 1e-5);
    EXPECT_NEAR(smvie_dual_objective(P, r.dual), r.dual_objective, 1e-9);
    for (const auto& v : P.vertices()) EXPECT_LE(r.outer.level(v), 1.0 + 1e-6);
  }
}

TEST(Baselines, UnitCubePointMve) {
  const PointList v = Polytope::unit_box(3).vertices();
  const PointMveResult r = mve_of_points(v, 1e-10);
  // Ball of radius sqrt(3)/2: (sqrt(3)/2)^3
  EXPECT_NEAR(r.ellipsoid.volume(), 0.649519052838329, 1e-8);
  EXPECT_LE(r.measure, 1e-10);
}

TEST(Baselines, ExactMatchesPointMve) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Polytope P = random_polytope(3, 6, seed);
    const ExactMveResult ex = solve_exact_constraint_generation(P);
    const PointMveResult pm = mve_of_points(P.vertices(), 1e-10);
    EXPECT_NEAR(ex.ellipsoid.log_volume(), pm.ellipsoid.log_volume(), 1e-5);
    EXPECT_LE(separation_oracle(P, ex.ellipsoid).violation, 1.0 + 1e-6);
  }
}

TEST(Baselines, SeparationOracleFindsFarthestVertex) {
  const Polytope P = Polytope::unit_box(2);
  const Ellipsoid B = Ellipsoid::ball(VectorXd::Zero(2), 1.0);
  const Separation s = separation_oracle(P, B);
  EXPECT_NEAR(s.violation, 2.0, 1e-12);
  EXPECT_TRUE(s.point.isApprox(VectorXd::Ones(2), 1e-12));
}

TEST(Baselines, SprocFixedPointOfBall) {
  // Unit disc inside [-1, 1]^2: the disc is its own minimum-volume cover.
  const Polytope P = Polytope::box(VectorXd::Constant(2, -1.0), VectorXd::Constant(2, 1.0));
  const QuadSet Q(P, {{MatrixXd::Identity(2, 2), VectorXd::Zero(2)}}, VectorXd::Zero(2));
  const Ellipsoid E = solve_sproc(Q);
  EXPECT_NEAR(E.volume(), 1.0, 1e-5);
}

TEST(Baselines, KttCoversSquare) {
  const Polytope P = Polytope::unit_box(2);
  const Ellipsoid E = solve_ktt(P);
  for (const auto& v : P.vertices()) EXPECT_LE(E.level(v), 1.0 + 1e-6);
  EXPECT_GE(E.volume(), 0.5 - 1e-6);
}

TEST(Baselines, VerifySmvieDualRejectsPerturbation) {
  const Polytope P = Polytope::unit_box(2);
  SmvieDual D = solve_smvie(P).dual;
  D.rho(0) += 0.5;
  EXPECT_FALSE(verify_smvie_dual(P, D).passed);
}

TEST(Baselines, SpreadVerticesSpanHull) {
  const PointList v = Polytope::unit_box(3).vertices();
  const std::vector<int> idx = spread_vertices(v);
  ASSERT_EQ(idx.size(), 4u);
  PointList sub;
  for (int i : idx) sub.push_back(v[i]);
  EXPECT_EQ(affine_rank(sub), 3);
}
