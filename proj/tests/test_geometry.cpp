#include <gtest/gtest.h>

#include <cmath>

#include "lowner/geometry.hpp"
#include "lowner/rng.hpp"

using namespace lowner;

TEST(Ellipsoid, VolumeRadiusAndCenter) {
  MatrixXd A(2, 2);
  A << 2, 0, 0, 0.5;
  const Ellipsoid E(A, VectorXd::Zero(2));
  EXPECT_NEAR(E.volume(), 1.0, 1e-15);
  EXPECT_NEAR(ellipsoid_volume(E), 1.0, 1e-15);
  EXPECT_NEAR(E.radius(), 1.0, 1e-15);
  const Ellipsoid B = Ellipsoid::ball((VectorXd(2) << 1, 2).finished(), 3.0);
  EXPECT_NEAR(B.volume(), 9.0, 1e-12);
  EXPECT_NEAR(B.radius(), 3.0, 1e-12);
  EXPECT_TRUE(B.center().isApprox((VectorXd(2) << 1, 2).finished(), 1e-14));
  EXPECT_NEAR(B.log_volume(), std::log(9.0), 1e-12);
}

TEST(Ellipsoid, Containment) {
  const Ellipsoid B = Ellipsoid::ball(VectorXd::Zero(2), 1.0);
  EXPECT_TRUE(ellipsoid_contains(B, (VectorXd(2) << 1, 0).finished(), 1e-12));
  EXPECT_FALSE(ellipsoid_contains(B, (VectorXd(2) << 1.001, 0).finished(), 1e-9));
  EXPECT_TRUE(B.contains((VectorXd(2) << 0.6, 0.8).finished()));
}

TEST(Ellipsoid, ScaledKeepsCenter) {
  const Ellipsoid B = Ellipsoid::ball((VectorXd(3) << 1, 0, -1).finished(), 2.0);
  const Ellipsoid S = B.scaled(2.0);
  EXPECT_NEAR(S.radius(), 4.0, 1e-12);
  EXPECT_TRUE(S.center().isApprox(B.center(), 1e-14));
}

TEST(Ellipsoid, RejectsInvalidShapes) {
  MatrixXd A(2, 2);
  A << 1, 0.5, 0, 1;
  EXPECT_THROW(Ellipsoid(A, VectorXd::Zero(2)), std::invalid_argument);
  A << 1, 0, 0, -1;
  EXPECT_THROW(Ellipsoid(A, VectorXd::Zero(2)), std::invalid_argument);
  EXPECT_THROW(Ellipsoid(MatrixXd::Identity(2, 2), VectorXd::Zero(3)), std::invalid_argument);
}

TEST(Polytope, UnitBoxVertices) {
  const Polytope P = Polytope::unit_box(3);
  EXPECT_EQ(P.vertices().size(), 8u);
  for (const auto& v : P.vertices()) EXPECT_TRUE(P.contains(v, 1e-9));
  EXPECT_TRUE(P.interior_point().isApprox(VectorXd::Constant(3, 0.5), 1e-12));
}

TEST(Polytope, SimplexVertices) {
  const Polytope P = Polytope::standard_simplex(3);
  EXPECT_EQ(P.vertices().size(), 4u);
  EXPECT_EQ(affine_rank(P.vertices()), 3);
}

TEST(Polytope, RedundantRowsAndDedup) {
  MatrixXd S(5, 2);
  S << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
  VectorXd t(5);
  t << 1, 0, 1, 0, 2;  // the last row touches the corner (1, 1)
  EXPECT_EQ(enumerate_vertices(S, t).size(), 4u);
}

TEST(Polytope, RejectsUnboundedEmptyAndFlat) {
  MatrixXd S(2, 2);
  S << 1, 0, 0, 1;
  EXPECT_TRUE(is_unbounded(S));
  EXPECT_THROW(enumerate_vertices(S, VectorXd::Ones(2)), std::invalid_argument);
  MatrixXd S2(4, 1);
  S2 << 1, -1, 1, -1;
  VectorXd t2(4);
  t2 << 1, 0, -2, 3;  // x <= 1 and x >= 3
  EXPECT_THROW(enumerate_vertices(S2, t2), std::invalid_argument);
  MatrixXd S3(4, 2);
  S3 << 1, 0, -1, 0, 0, 1, 0, -1;
  VectorXd t3(4);
  t3 << 1, 0, 0, 0;  // a segment
  EXPECT_THROW(enumerate_vertices(S3, t3), std::invalid_argument);
}

TEST(QuadSet, MembershipAndWitness) {
  const Polytope P = Polytope::box(VectorXd::Constant(2, -1.0), VectorXd::Constant(2, 1.0));
  const QuadSet Q(P, {{MatrixXd::Identity(2, 2), VectorXd::Zero(2)}}, VectorXd::Zero(2));
  EXPECT_TRUE(membership(Q, (VectorXd(2) << 0.7, 0.7).finished()));
  EXPECT_FALSE(membership(Q, (VectorXd(2) << 0.9, 0.9).finished()));
  EXPECT_THROW(QuadSet(P, {{MatrixXd::Identity(2, 2), VectorXd::Zero(2)}}, VectorXd::Ones(2)), std::invalid_argument);
}

TEST(Voronoi, CellsCoverParentAndHoldSeeds) {
  const Polytope P = Polytope::unit_box(2);
  const PointList seeds = {(VectorXd(2) << 0.2, 0.3).finished(), (VectorXd(2) << 0.8, 0.6).finished(),
                           (VectorXd(2) << 0.4, 0.9).finished()};
  const PartitionFamily fam = voronoi_partition(P, seeds);
  ASSERT_EQ(fam.cells.size(), 3u);
  for (std::size_t j = 0; j < seeds.size(); ++j) EXPECT_TRUE(fam.cells[j].contains(seeds[j], 1e-9));
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const VectorXd x = sample_polytope(P, rng);
    bool covered = false;
    for (const auto& c : fam.cells) covered = covered || c.contains(x, 1e-9);
    EXPECT_TRUE(covered);
  }
}

TEST(Voronoi, RejectsBadSeeds) {
  const Polytope P = Polytope::unit_box(2);
  EXPECT_THROW(voronoi_partition(P, {}), std::invalid_argument);
  EXPECT_THROW(voronoi_partition(P, {VectorXd::Constant(2, 2.0)}), std::invalid_argument);
  EXPECT_THROW(voronoi_partition(P, {VectorXd::Constant(2, 0.5), VectorXd::Constant(2, 0.5)}), std::invalid_argument);
}

TEST(SymSqrt, SquaresBack) {
  MatrixXd M(2, 2);
  M << 4, 1, 1, 3;
  const MatrixXd R = sym_sqrt(M);
  EXPECT_TRUE((R * R).isApprox(M, 1e-12));
}

TEST(Rng, DeterministicStreams) {
  Rng a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NEAR(r.unit_sphere(5).norm(), 1.0, 1e-14);
}
