#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lowner/copositive.hpp"
#include "lowner/geometry.hpp"
#include "lowner/sdp.hpp"

namespace lowner {

// T(x)^T xi + h(x) <= (W xi + w)^T y, with T(x) = T0 + Tx x and h(x) = h0 + hx^T x.
// Equality rows require W = 0 and are enforced by matching coefficients of the decision rule.
struct RecourseRow {
  MatrixXd W;   // N2 x K
  VectorXd w;   // N2
  VectorXd T0;  // K
  MatrixXd Tx;  // K x N1
  double h0 = 0.0;
  VectorXd hx;  // N1
  bool equality = false;
};

struct DroInstance {
  int N1 = 0;  // first-stage dimension
  int N2 = 0;  // recourse dimension
  int K = 0;   // uncertainty dimension
  VectorXd c;
  MatrixXd G;  // first-stage rows G x <= f
  VectorXd f;
  MatrixXd D;  // N2 x K
  VectorXd d;  // N2
  std::vector<RecourseRow> rows;
  Polytope support;
  VectorXd mu;
  MatrixXd Sigma;

  void validate() const;
  RecourseRow make_row() const;  // zero-initialized row of matching dimensions
};

struct PldPolicy {
  VectorXd x;
  std::vector<MatrixXd> Y;  // N2 x K per cell
  std::vector<VectorXd> y;
  std::vector<Polytope> cells;
  std::vector<Ellipsoid> ellipsoids;
  MatrixXd Gamma;
  VectorXd beta;
  double alpha = 0.0;
  double objective = 0.0;
  SdpStatus status = SdpStatus::optimal;
  int newton_steps = 0;

  VectorXd decision(int cell, const VectorXd& xi) const { return Y[cell] * xi + y[cell]; }
};

struct Partitions {
  PartitionFamily family;
  std::vector<Ellipsoid> ellipsoids;
};

// Voronoi cells with one copositive bounding ellipsoid per cell; cells are fitted as a parallel map.
Partitions build_partitions(const Polytope& support, const PointList& seeds, int threads = 1,
                            const CopOptions& opts = {});

PointList sample_seeds(const Polytope& support, int J, std::uint64_t seed);

enum class RuleClass { linear, constant };

PldPolicy solve_pld(const DroInstance& inst, const std::vector<Polytope>& cells, const std::vector<Ellipsoid>& ellipsoids,
                    RuleClass rule = RuleClass::linear, const SdpSettings& settings = {});

// mode: "pwl" | "pws" | "ldr" | "pwl2"
PldPolicy solve_ablation(const DroInstance& inst, const Partitions& parts, const std::string& mode,
                         const SdpSettings& settings = {}, const CopOptions& opts = {});

// Largest violation of any recourse row at xi under the rule of `cell` (positive = violated).
double policy_violation(const DroInstance& inst, const PldPolicy& pol, int cell, const VectorXd& xi);

// Worst-case CVaR inventory model: x = (kappa, order quantities), y = (tau, excess, shortfall),
// uncertainty (demand, stock-out cost).
DroInstance generate_inventory_instance(int N, std::uint64_t seed, double budget = 30.0, double eps = 0.05);

// min tau s.t. xi^T y(xi) <= tau, y(xi) = xi on the box [-1/sqrt(K), 1/sqrt(K)]^K.
DroInstance example_ball_instance(int K);
Ellipsoid example_ball_ellipsoid(int K, double r);  // {||xi||^2 <= r}

// min tau s.t. 1 <= (xi + e)^T y(xi) <= tau on the unit cube.
DroInstance example_cube_instance(int K);
Ellipsoid example_cube_ellipsoid(int K, double s);  // {||xi - e/2||^2 <= K (1 + s) / 4}
double example_cube_bound(double s);                // 9/(8-s), 1+s/4, 2

}  // namespace lowner
