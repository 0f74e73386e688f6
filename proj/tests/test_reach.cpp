#include <gtest/gtest.h>

#include <cmath>

#include "lowner/reach.hpp"

using namespace lowner;

TEST(Reach, FirstStepsOfExampleSystem) {
  const std::vector<Ellipsoid> E = run_paper_example(3);
  ASSERT_EQ(E.size(), 3u);
  EXPECT_NEAR(E[0].radius(), 1.4, 1e-4);
  EXPECT_NEAR(E[1].radius(), 2.73259, 1e-4);
  EXPECT_NEAR(E[2].radius(), 4.00177, 1e-4);
}

TEST(Reach, CertificatesAndSamplesHold) {
  const LinearSystem sys = example_reach_system();
  const std::vector<ReachStep> steps = propagate_horizon(sys, 3);
  std::optional<Ellipsoid> prev;
  for (const auto& s : steps) {
    EXPECT_FALSE(s.closed_form);
    const CertificateReport rep =
        verify_certificate(s.lifted, s.ellipsoid, s.certificate, 1e-6, reach_generators(sys, prev));
    EXPECT_TRUE(rep.passed) << rep.failure;
    prev = s.ellipsoid;
  }
  for (const auto& x : sample_reachable(sys, 3, 300, 1)) EXPECT_LE(steps[2].ellipsoid.level(x), 1.0 + 1e-6);
  for (const auto& x : reachable_boundary(sys, 3, 64)) EXPECT_LE(steps[2].ellipsoid.level(x), 1.0 + 1e-6);
}

TEST(Reach, PointControlUsesClosedForm) {
  LinearSystem sys = example_reach_system();
  const VectorXd u0 = sys.U.interior_point();
  sys.U = Polytope(sys.U.S(), sys.U.S() * u0);
  const Ellipsoid prev = Ellipsoid::ball(VectorXd::Zero(2), 1.0);
  const ReachStep s = propagate(sys, prev);
  EXPECT_TRUE(s.closed_form);
  EXPECT_NEAR(s.ellipsoid.volume(), std::abs(sys.W1.determinant()), 1e-9);
  EXPECT_TRUE(s.ellipsoid.center().isApprox(sys.W2 * u0, 1e-9));
}

TEST(Reach, ExactMembership) {
  const LinearSystem sys = example_reach_system();
  EXPECT_TRUE(reach_membership_exact(sys, VectorXd::Zero(2), 2));
  for (const auto& x : reachable_boundary(sys, 2, 16)) {
    EXPECT_TRUE(reach_membership_exact(sys, x, 2));
    EXPECT_FALSE(reach_membership_exact(sys, 1.01 * x, 2));
  }
}

TEST(Reach, EllipsoidBoundaryLiesOnLevelOne) {
  const Ellipsoid E = run_paper_example(1)[0];
  for (const auto& x : ellipsoid_boundary(E, 32)) EXPECT_NEAR(E.level(x), 1.0, 1e-9);
}

TEST(Reach, RejectsBadSystems) {
  LinearSystem sys = example_reach_system();
  sys.W2 = MatrixXd::Identity(3, 3);
  EXPECT_THROW(sys.validate(), std::invalid_argument);
  EXPECT_THROW(propagate_horizon(example_reach_system(), 0), std::invalid_argument);
}
