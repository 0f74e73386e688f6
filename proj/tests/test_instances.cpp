#include <gtest/gtest.h>

#include <cmath>

#include "lowner/baselines.hpp"
#include "lowner/instances.hpp"

using namespace lowner;

TEST(Instances, RandomPolytopeIsDeterministicAndBounded) {
  const Polytope a = random_polytope(3, 6, 7);
  const Polytope b = random_polytope(3, 6, 7);
  EXPECT_TRUE(a.S().isApprox(b.S(), 0.0));
  EXPECT_TRUE(a.t().isApprox(b.t(), 0.0));
  EXPECT_EQ(a.rows(), 12);
  EXPECT_GE(affine_rank(a.vertices()), 3);
  for (const auto& v : a.vertices()) {
    EXPECT_GE(v.minCoeff(), -1e-9);
    EXPECT_LE(v.maxCoeff(), 1.0 + 1e-9);
  }
  EXPECT_FALSE(random_polytope(3, 6, 8).t().isApprox(a.t()));
}

TEST(Instances, RandomPolytopeKeepsCenter) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Polytope P = random_polytope(4, 8, seed);
    EXPECT_TRUE(P.contains(VectorXd::Constant(4, 0.5)));
  }
}

TEST(Instances, RandomSimplexHasUnitRowsAndFullHull) {
  const Polytope P = random_simplex(3, 2);
  EXPECT_EQ(P.rows(), 4);
  for (int i = 0; i < P.rows(); ++i) EXPECT_NEAR(P.S().row(i).norm(), 1.0, 1e-12);
  EXPECT_EQ(P.vertices().size(), 4u);
  EXPECT_EQ(affine_rank(P.vertices()), 3);
}

TEST(Instances, ChippedHypercube) {
  const Polytope P = chipped_hypercube(3);
  EXPECT_EQ(P.rows(), 7);
  EXPECT_TRUE(P.contains(VectorXd::Zero(3)));
  EXPECT_FALSE(P.contains(VectorXd::Ones(3)));
  EXPECT_THROW(chipped_hypercube(1), std::invalid_argument);
}

TEST(Instances, ChippedClosedForms) {
  for (int K = 2; K <= 8; ++K) {
    const double expect = std::pow(std::pow(K, K) / std::pow(K + 1.0, 0.5 * (K + 1)), 1.0 / K);
    EXPECT_NEAR(chipped_smvie_radius(K), expect, 1e-12);
    const ChippedDual d = chipped_closed_form_dual(K);
    EXPECT_TRUE(verify_smvie_dual(chipped_hypercube(K), d.dual).passed) << "K = " << K;
    EXPECT_NEAR(std::pow(chipped_mvie_det(K), 1.0 / K), chipped_smvie_radius(K), 1e-12);
  }
}

TEST(Instances, RejectsBadArguments) {
  EXPECT_THROW(random_polytope(0, 1, 1), std::invalid_argument);
  EXPECT_THROW(random_simplex(0, 1), std::invalid_argument);
}
