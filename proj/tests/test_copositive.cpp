#include <gtest/gtest.h>

#include <cmath>

#include "lowner/baselines.hpp"
#include "lowner/copositive.hpp"
#include "lowner/instances.hpp"
#include "lowner/rng.hpp"

using namespace lowner;

namespace {

void expect_covers(const Ellipsoid& E, const PointList& pts, double tol = 1e-6) {
  for (const auto& v : pts) EXPECT_LE(E.level(v), 1.0 + tol);
}

}  // namespace

TEST(Copositive, SquareIsExact) {
  const Polytope P = Polytope::unit_box(2);
  const CopResult r = solve_polytope_mve(P);
  ASSERT_EQ(r.status, SdpStatus::optimal);
  EXPECT_NEAR(r.ellipsoid.volume(), 0.5, 1e-6);
  EXPECT_TRUE(r.ellipsoid.center().isApprox(VectorXd::Constant(2, 0.5), 1e-5));
  ASSERT_EQ(r.certificates.size(), 1u);
  EXPECT_TRUE(verify_certificate(P, r.ellipsoid, r.certificates[0]).passed);
}

TEST(Copositive, SimplexIsExact) {
  const Polytope P = Polytope::standard_simplex(2);
  const CopResult r = solve_polytope_mve(P);
  ASSERT_EQ(r.status, SdpStatus::optimal);
  EXPECT_NEAR(r.ellipsoid.volume(), 4.0 / (3.0 * std::sqrt(3.0)) / 2.0 * 1.0, 1e-5);
  expect_covers(r.ellipsoid, P.vertices());
}

TEST(Copositive, CoversRandomPolytopes) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Polytope P = random_polytope(3, 6, seed);
    const CopResult r = solve_polytope_mve(P);
    ASSERT_EQ(r.status, SdpStatus::optimal);
    expect_covers(r.ellipsoid, P.vertices());
    EXPECT_TRUE(verify_certificate(P, r.ellipsoid, r.certificates[0]).passed);
    Rng rng(seed, 9);
    for (int i = 0; i < 200; ++i) EXPECT_TRUE(r.ellipsoid.contains(sample_polytope(P, rng), 1e-6));
  }
}

TEST(Copositive, QuadSetBoxBall) {
  // Box [-1, 1]^2 intersected with the unit disc: the disc itself is optimal.
  const Polytope P = Polytope::box(VectorXd::Constant(2, -1.0), VectorXd::Constant(2, 1.0));
  const QuadSet Q(P, {{MatrixXd::Identity(2, 2), VectorXd::Zero(2)}}, VectorXd::Zero(2));
  const CopResult r = solve_quadset_mve(Q);
  ASSERT_EQ(r.status, SdpStatus::optimal);
  EXPECT_NEAR(r.ellipsoid.volume(), 1.0, 1e-5);
  EXPECT_TRUE(verify_certificate(Q, r.ellipsoid, r.certificates[0]).passed);
}

TEST(Copositive, MinkowskiOfSquares) {
  const Polytope P = Polytope::unit_box(2);
  const CopResult r = solve_minkowski_mve({P, P}, {MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2)});
  ASSERT_EQ(r.status, SdpStatus::optimal);
  // The sum is [0, 2]^2, whose minimum-volume ellipsoid has volume 2.
  EXPECT_NEAR(r.ellipsoid.volume(), 2.0, 1e-4);
  expect_covers(r.ellipsoid, Polytope::box(VectorXd::Zero(2), VectorXd::Constant(2, 2.0)).vertices());
}

TEST(Copositive, UnionCoversParts) {
  const Polytope A = Polytope::box(VectorXd::Zero(2), VectorXd::Ones(2));
  const Polytope B = Polytope::box(VectorXd::Constant(2, 1.5), VectorXd::Constant(2, 2.0));
  const CopResult r = solve_union_mve({A, B});
  ASSERT_EQ(r.status, SdpStatus::optimal);
  ASSERT_EQ(r.certificates.size(), 2u);
  expect_covers(r.ellipsoid, A.vertices());
  expect_covers(r.ellipsoid, B.vertices());
}

TEST(Copositive, ProjectionOfCube) {
  const Polytope P = Polytope::unit_box(3);
  const CopResult r = solve_projection_mve(P, 2);
  ASSERT_EQ(r.status, SdpStatus::optimal);
  EXPECT_NEAR(r.ellipsoid.volume(), 0.5, 1e-5);
}

TEST(Copositive, ChippedClosedFormCertificate) {
  for (int K = 2; K <= 6; ++K) {
    const Polytope P = chipped_hypercube(K);
    const ChippedPrimal cp = chipped_closed_form_certificate(K);
    EXPECT_TRUE(verify_certificate(P, cp.ellipsoid, cp.certificate, 1e-7).passed) << "K = " << K;
  }
}

TEST(Copositive, LiftedSmvieCertificate) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Polytope P = random_polytope(2, 4, seed);
    const SmvieResult s = solve_smvie(P);
    const LiftedCertificate lc = lift_smvie_certificate(P, s.dual.Lambda, s.dual.rho);
    EXPECT_TRUE(verify_certificate(P, lc.ellipsoid, lc.certificate, 1e-6).passed);
    EXPECT_NEAR(lc.ellipsoid.log_volume(), s.outer.log_volume(), 1e-5);
  }
}

TEST(Copositive, VerifierRejectsShrunkEllipsoid) {
  const Polytope P = Polytope::unit_box(2);
  const CopResult r = solve_polytope_mve(P);
  const CertificateReport rep = verify_certificate(P, r.ellipsoid.scaled(0.9), r.certificates[0]);
  EXPECT_FALSE(rep.passed);
  EXPECT_FALSE(rep.failure.empty());
}

TEST(Copositive, RejectsMismatchedParts) {
  EXPECT_THROW(solve_lifted_mve({}), std::invalid_argument);
  EXPECT_THROW(solve_union_mve({Polytope::unit_box(2), Polytope::unit_box(3)}), std::invalid_argument);
}
