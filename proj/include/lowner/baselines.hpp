#pragma once

#include <utility>
#include <vector>

#include "lowner/geometry.hpp"
#include "lowner/sdp.hpp"

namespace lowner {

// {B u + d : ||u|| <= 1}
struct InscribedEllipsoid {
  MatrixXd B;
  VectorXd d;
};

struct SmvieDual {
  MatrixXd Lambda;  // J x K
  VectorXd rho;     // J
};

struct SmvieResult {
  Ellipsoid outer;  // {K B u + d}
  InscribedEllipsoid inner;
  SmvieDual dual;
  double primal_objective = 0.0;  // log det(K B)
  double dual_objective = 0.0;    // K rho^T t - K - log det(-(S^T Lambda + Lambda^T S)/2)
};

InscribedEllipsoid solve_mvie(const Polytope& P, const SdpSettings& settings = {});
SmvieDual solve_smvie_dual(const Polytope& P, double* objective = nullptr, const SdpSettings& settings = {});
double smvie_dual_objective(const Polytope& P, const SmvieDual& D);
SmvieResult solve_smvie(const Polytope& P, const SdpSettings& settings = {});

struct SmvieDualReport {
  double equality_residual = 0.0;  // ||S^T rho||_inf
  double soc_min_slack = 0.0;      // min_j rho_j - ||Lambda_j||
  double shape_min_eig = 0.0;      // of -(S^T Lambda + Lambda^T S)/2
  bool passed = false;
};
SmvieDualReport verify_smvie_dual(const Polytope& P, const SmvieDual& D, double tol = 1e-7);

Ellipsoid solve_sproc(const QuadSet& Q, const SdpSettings& settings = {});
Ellipsoid solve_ktt(const Polytope& P, const SdpSettings& settings = {});

struct PointMveResult {
  Ellipsoid ellipsoid;
  double measure = 0.0;  // max(omega_max / (K+1) - 1, 1 - omega_min / (K+1)) at termination
  int iterations = 0;
  VectorXd weights;
};

PointMveResult mve_of_points(const PointList& points, double eps = 1e-7, int max_iterations = 200000);

struct Separation {
  VectorXd point;
  double violation = 0.0;  // ||A v + b||^2
  int index = -1;
};
Separation separation_oracle(const Polytope& P, const Ellipsoid& E);

struct ExactMveResult {
  Ellipsoid ellipsoid;
  int rounds = 0;
  std::vector<int> active;  // vertex indices in the working set
};
ExactMveResult solve_exact_constraint_generation(const Polytope& P, double tol = 1e-7, double eps = 1e-9);

// K+1 vertices spreading the affine hull, chosen greedily.
std::vector<int> spread_vertices(const PointList& pts);

}  // namespace lowner
