#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lowner/copositive.hpp"
#include "lowner/geometry.hpp"

namespace lowner {

// x(t+1) = W1 x(t) + W2 u(t), u(t) in U, x(0) = 0.
struct LinearSystem {
  MatrixXd W1;  // K x K
  MatrixXd W2;  // K x J
  Polytope U;

  int state_dim() const { return static_cast<int>(W1.rows()); }
  int input_dim() const { return static_cast<int>(W2.cols()); }
  void validate() const;
};

struct ReachStep {
  Ellipsoid ellipsoid;
  Certificate certificate;
  LiftedSet lifted;  // the set W1 E_prev + W2 U in lifted form
  int newton_steps = 0;
  bool closed_form = false;  // point control set: mapped ellipsoid, no certificate
};

// Cover of W1 E_prev + W2 U; E_prev = nullopt stands for the initial state {0}.
ReachStep propagate(const LinearSystem& sys, const std::optional<Ellipsoid>& prev, const CopOptions& opts = {});

// E_1 .. E_T.
std::vector<ReachStep> propagate_horizon(const LinearSystem& sys, int T, const CopOptions& opts = {});

LinearSystem example_reach_system();
std::vector<Ellipsoid> run_paper_example(int T, const CopOptions& opts = {});

// Points at which the one-step certificate's first form is checked: boundary of E_prev times vertices of U.
PointList reach_generators(const LinearSystem& sys, const std::optional<Ellipsoid>& prev, int boundary_samples = 64);

// States reached at time T under random vertex-control sequences.
PointList sample_reachable(const LinearSystem& sys, int T, int count, std::uint64_t seed);

// Exact reachability of x at time T as a strict-feasibility problem in the controls.
bool reach_membership_exact(const LinearSystem& sys, const VectorXd& x, int T, double tol = 1e-6);

// Support points of the exact reachable set along `directions` equally spaced angles (K = 2).
PointList reachable_boundary(const LinearSystem& sys, int T, int directions = 256);

// Boundary polyline of a planar ellipsoid.
PointList ellipsoid_boundary(const Ellipsoid& E, int samples = 256);

}  // namespace lowner
