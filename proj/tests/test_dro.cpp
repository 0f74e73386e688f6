#include <gtest/gtest.h>

#include <cmath>

#include "lowner/dro.hpp"
#include "lowner/rng.hpp"

using namespace lowner;

TEST(Dro, BallExampleMatchesRadius) {
  const DroInstance inst = example_ball_instance(3);
  for (double r : {1.0, 1.5, 2.0}) {
    const PldPolicy pol = solve_pld(inst, {inst.support}, {example_ball_ellipsoid(3, r)});
    ASSERT_EQ(pol.status, SdpStatus::optimal);
    EXPECT_NEAR(pol.objective, r, 1e-5) << "r = " << r;
  }
}

TEST(Dro, CubeExampleMatchesBound) {
  const DroInstance inst = example_cube_instance(3);
  for (double s : {0.0, 1.0, 3.0, 5.0}) {
    const PldPolicy pol = solve_pld(inst, {inst.support}, {example_cube_ellipsoid(3, s)});
    ASSERT_EQ(pol.status, SdpStatus::optimal);
    EXPECT_NEAR(pol.objective, example_cube_bound(s), 1e-5) << "s = " << s;
  }
}

TEST(Dro, CubePolicyIsFeasibleOnSupport) {
  const DroInstance inst = example_cube_instance(2);
  const PldPolicy pol = solve_pld(inst, {inst.support}, {example_cube_ellipsoid(2, 1.0)});
  Rng rng(4);
  for (int i = 0; i < 500; ++i) EXPECT_LE(policy_violation(inst, pol, 0, sample_polytope(inst.support, rng)), 1e-6);
  for (const auto& v : inst.support.vertices()) EXPECT_LE(policy_violation(inst, pol, 0, v), 1e-6);
}

TEST(Dro, ConstantRuleIsNoBetterThanLinear) {
  const DroInstance inst = example_cube_instance(2);
  const Ellipsoid E = example_cube_ellipsoid(2, 1.0);
  const double lin = solve_pld(inst, {inst.support}, {E}, RuleClass::linear).objective;
  const double cst = solve_pld(inst, {inst.support}, {E}, RuleClass::constant).objective;
  EXPECT_GE(cst, lin - 1e-6);
}

TEST(Dro, PartitionsCoverSeedsAndCells) {
  const DroInstance inst = generate_inventory_instance(2, 1);
  const Partitions parts = build_partitions(inst.support, sample_seeds(inst.support, 3, 1));
  ASSERT_EQ(parts.family.cells.size(), 3u);
  ASSERT_EQ(parts.ellipsoids.size(), 3u);
  for (std::size_t j = 0; j < parts.family.cells.size(); ++j)
    for (const auto& v : parts.family.cells[j].vertices()) EXPECT_LE(parts.ellipsoids[j].level(v), 1.0 + 1e-6);
}

TEST(Dro, InventorySeedOneFrozenObjectives) {
  const DroInstance inst = generate_inventory_instance(3, 1);
  const Partitions parts = build_partitions(inst.support, sample_seeds(inst.support, 2, 1));
  const double pwl = solve_ablation(inst, parts, "pwl").objective;
  const double pws = solve_ablation(inst, parts, "pws").objective;
  EXPECT_NEAR(pwl, 29.1204, 1e-3);
  EXPECT_NEAR(pws, 30.0, 1e-3);
  EXPECT_GE(pws, pwl - 1e-6 * std::abs(pwl));
}

TEST(Dro, RejectsInconsistentInputs) {
  DroInstance inst = example_cube_instance(2);
  EXPECT_THROW(solve_pld(inst, {inst.support}, {}), std::invalid_argument);
  EXPECT_THROW(solve_ablation(inst, {voronoi_partition(inst.support, {VectorXd::Constant(2, 0.5)}), {}}, "bogus"),
               std::invalid_argument);
  inst.mu = VectorXd::Zero(3);
  EXPECT_THROW(inst.validate(), std::invalid_argument);
}
